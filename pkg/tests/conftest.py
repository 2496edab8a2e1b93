import os
import random
import shlex
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from jetlift.randgen import FunctionConfig, LdoConfig, random_local_function

settings.register_profile(
    "jetlift", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("jetlift")

SMALL_LF = FunctionConfig(x_degree=2, jet_order=2, max_terms=3, max_u_factors=2, coeff_bound=4)
SMALL_LDO = LdoConfig(max_terms=3, xi_order=2, eta_order=1, eta_letters=1)


# (kind, dim, arity, text): a fixed set of well-formed inputs for round trips and fuzzing
CORPUS = [
    ("lf", 1, 1, "0"), ("lf", 1, 1, "-3/4"), ("lf", 1, 1, "x[1]^3"),
    ("lf", 1, 1, "u[(0)]*u[(2)] - x[1]"), ("lf", 2, 1, "x[1]*x[2]*u[(1,1)]"),
    ("lf", 2, 1, "(x[1] + u[(0,0)])^2"), ("lf", 1, 1, "2*(x[1] - 1)*(x[1] + 1)"),
    ("ldo", 1, 1, "x[1]*D[1,1]"), ("ldo", 1, 1, "V[1,(1)]*D[1,1]"),
    ("ldo", 1, 1, "D[1,1]^3 + 2*D[1,1] - 1"), ("ldo", 1, 1, "D[1,1]*u[(0)]"),
    ("ldo", 1, 1, "V[1,(0)]^2"), ("ldo", 1, 1, "u[(1)]*V[1,(2)]*V[1,(0)]"),
    ("ldo", 2, 1, "D[1,1]*D[1,2] - D[1,2]*D[1,1]"), ("ldo", 2, 1, "x[2]*D[1,1] + x[1]*D[1,2]"),
    ("ldo", 2, 1, "V[1,(1,0)]*D[1,1]"), ("ldo", 1, 2, "D[1,1]*D[2,1]"),
    ("ldo", 1, 2, "Z[1]"), ("ldo", 1, 2, "Z[1]^2 - D[2,1]"),
    ("ldo", 1, 2, "u[(0)]*V[1,(0)]*V[2,(1)]"), ("ldo", 1, 3, "D[1,1]*D[2,1]*D[3,1]"),
    ("ldo", 2, 2, "Z[2]*V[1,(0,0)]*V[2,(0,0)]"), ("ldo", 1, 2, "(D[1,1] + D[2,1])*V[2,(0)]"),
    ("ldo", 1, 1, "1/2*x[1]^2*D[1,1]^2"), ("ldo", 1, 1, "(x[1]*D[1,1])^2"),
    ("hform", 1, 1, "u[(1)]*dx[1]"), ("hform", 1, 1, "x[1]"), ("hform", 2, 1, "x[1]*dx[1] + x[2]*dx[2]"),
    ("hform", 2, 1, "dx[2,1]"), ("hform", 2, 1, "u[(0,1)]*dx[1,2]"), ("hform", 2, 1, "dx[1,1]"),
    ("hform", 2, 1, "(x[1] + x[2])*dx[1]"), ("oform", 1, 1, "D[1,1]*dx[1]"),
    ("oform", 2, 1, "D[1,1]*dx[2] - D[1,2]*dx[1]"), ("oform", 2, 2, "Z[1]*dx[1,2]"),
    ("oform", 2, 1, "x[1]*V[1,(0,0)]"), ("oform", 1, 2, "(D[1,1] - D[2,1])*dx[1]"),
    ("ldo", 1, 1, "V[1,(3)]*D[1,1]^2"), ("ldo", 2, 1, "V[1,(1,1)]*D[1,1]*D[1,2]"),
    ("ldo", 1, 1, "(1 + u[(0)])*(D[1,1] - V[1,(1)])"), ("lf", 1, 1, "((x[1]))"),
    ("lf", 1, 1, "u[(0)]^0"), ("lf", 2, 1, "-(x[1] - x[2])^3"), ("ldo", 1, 1, "D[1,1]^0"),
    ("ldo", 1, 2, "Z[1]*Z[1] - Z[1]^2"), ("ldo", 1, 2, "x[1]*D[2,1]*V[1,(0)]"),
    ("hform", 2, 1, "-dx[1,2] + dx[2,1]"), ("oform", 2, 1, "u[(0,0)]*D[1,1]*dx[1,2]"),
    ("lf", 2, 1, "3/6*x[2]"), ("ldo", 2, 1, "D[1,2]^2*x[2]"),
]


_FUZZ_ALPHABET = "0123456789[](),*^+-/ xuDVZd\n"


def mutate(rng, text: str) -> str:
    """A near miss of ``text``: one to three character edits."""
    chars = list(text)
    for _ in range(rng.randint(1, 3)):
        op = rng.choice("dirs")
        pos = rng.randrange(len(chars) + 1)
        if op == "d" and chars:
            del chars[min(pos, len(chars) - 1)]
        elif op == "i":
            chars.insert(pos, rng.choice(_FUZZ_ALPHABET))
        elif op == "r" and chars:
            chars[min(pos, len(chars) - 1)] = rng.choice(_FUZZ_ALPHABET)
        elif op == "s" and len(chars) > 1:
            p = min(pos, len(chars) - 2)
            chars[p], chars[p + 1] = chars[p + 1], chars[p]
    return "".join(chars)


@pytest.fixture
def rng():
    return random.Random(12345)


def random_args(rng, dim, arity, cfg=SMALL_LF):
    return [random_local_function(rng, dim, cfg) for _ in range(arity)]


# evaluation on a section u = phi(x): an oracle independent of the jet algebra

def sympy_xs(dim):
    import sympy

    return sympy.symbols(f"x1:{dim + 1}")


def on_section(f, phi, xs):
    """The sympy expression ``f(x, j^oo phi(x))``."""
    import sympy

    out = sympy.Integer(0)
    for (xe, ue), c in f.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for x, e in zip(xs, xe):
            term *= x ** e
        for J, m in ue:
            d = phi
            for x, e in zip(xs, J):
                if e:
                    d = sympy.diff(d, x, e)
            term *= d ** m
        out += term
    return sympy.expand(out)


def random_section(rng, xs):
    import sympy

    expr = sympy.Integer(0)
    for _ in range(3):
        mono = sympy.Integer(rng.randint(-3, 3))
        for x in xs:
            mono *= x ** rng.randint(0, 3)
        expr += mono
    return expr + sum(xs) ** 4


# the CLI corpus: tests/corpus/commands.txt lists "<exit code> <argv...>" per line

CORPUS_DIR = Path(__file__).parent / "corpus"


def corpus_commands() -> list:
    out = []
    for line in (CORPUS_DIR / "commands.txt").read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            code, *argv = shlex.split(line)
            out.append((int(code), argv))
    return out


def run_cli(argv, seed=11):
    """Run the installed module in a fresh interpreter; returns (exit code, stdout bytes)."""
    env = dict(os.environ, JETLIFT_SEED=str(seed))
    proc = subprocess.run([sys.executable, "-m", "jetlift.cli", *argv, "--format", "json"],
                          cwd=CORPUS_DIR, env=env, capture_output=True)
    return proc.returncode, proc.stdout
