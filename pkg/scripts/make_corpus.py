"""Regenerate the JSON inputs of the CLI corpus in tests/corpus/.

The text inputs and the command manifest (commands.txt) are written by hand;
this script only produces the documents that are awkward to type.

    python3 scripts/make_corpus.py [outdir]
"""

import sys
from pathlib import Path

from jetlift.lifting import delta, lift
from jetlift.opcomplex import d_op
from jetlift.randgen import LdoConfig, make_rng, random_dend, random_liftable, random_oform
from jetlift.serialize import dumps
from jetlift.shlie import build_tower, kdv_bracket

ORDER = 5  # truncation of the KdV bracket; keeps every corpus command fast
TOWER_ORDER = 4  # the stored tower grows quickly with the order


def main(outdir: Path) -> None:
    rng = make_rng(2024)
    cfg = LdoConfig(max_terms=2, xi_order=1, eta_order=1)
    kdv = kdv_bracket(ORDER)
    docs = {
        "kdv.lt2": kdv,
        "kdv.tower": build_tower(kdv_bracket(TOWER_ORDER), kmax=3),
        "bilinear.ldo": random_liftable(rng, 1, 2, cfg),
        "closed.oform": d_op(random_oform(rng, 2, 1, 0, cfg)).unpolarized(),
    }
    docs["lifted.dend"] = lift(docs["bilinear.ldo"])
    docs["cycle.dend"] = delta(random_dend(rng, 2, 1, 2, cfg, density=0.8))
    outdir.mkdir(parents=True, exist_ok=True)
    for name, value in docs.items():
        (outdir / name).write_text(dumps(value, indent=1) + "\n", encoding="utf-8")
        print(f"wrote {outdir / name}")


if __name__ == "__main__":
    default = Path(__file__).resolve().parent.parent / "tests" / "corpus"
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else default)
