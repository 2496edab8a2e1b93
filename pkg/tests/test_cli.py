import io
import json

import pytest

from jetlift.cli import main
from jetlift.serialize import loads
from jetlift.syntax import parse_ldo

from conftest import CORPUS, CORPUS_DIR, corpus_commands, mutate, run_cli


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_liftable_examples(capsys):
    code, out, _ = run(capsys, "liftable", "--dim", "1", "--arity", "1", "x[1]*D[1,1]")
    assert code == 0
    assert "chi: -1" in out.splitlines()
    code, out, _ = run(capsys, "liftable", "--dim", "1", "--arity", "1", "x[1]^2*D[1,1]")
    assert code == 1
    assert "liftable: false" in out


def test_liftable_json(capsys):
    code, out, _ = run(capsys, "liftable", "x[1]*D[1,1]", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["liftable"] is True
    assert str(loads(json.dumps(data["chi"]), "ldo")) == "-1"


def test_parse_errors_exit_2_with_position(capsys):
    code, out, err = run(capsys, "char", "x[1]*D[1,")
    assert code == 2 and out == ""
    assert "line 1, col" in err


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "apply", "x[1]")[0] == 2  # missing argument function
    assert run(capsys, "lift", "--dim", "1", "missing-file.ldo")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("x[1]*D[1,1]\n"))
    code, out, _ = run(capsys, "char", "-")
    assert code == 0 and out.strip() == "-1"


def test_json_input_matches_text_input(capsys):
    _, once, _ = run(capsys, "adjoint", "--format", "json", "x[1]*D[1,1]")
    _, twice, _ = run(capsys, "adjoint", "--format", "json", once)
    assert loads(twice, "ldo") == parse_ldo("x[1]*D[1,1]", 1)


def test_dimension_mismatch_of_json_input(capsys):
    _, doc, _ = run(capsys, "char", "--dim", "2", "--format", "json", "D[1,1]")
    assert run(capsys, "char", "--dim", "1", doc)[0] == 2


@pytest.mark.parametrize("code,argv", corpus_commands(), ids=lambda v: v if isinstance(v, int) else v[0])
def test_corpus_exit_codes(capsys, monkeypatch, code, argv):
    monkeypatch.chdir(CORPUS_DIR)
    got, out, err = run(capsys, *argv, "--format", "json", "--seed", "11")
    assert got == code, err
    if code == 2:
        assert err.startswith("error:")
    elif out:
        json.loads(out)


def test_subprocess_output_is_deterministic():
    argv = ["shlie-build", "--jet-order", "1", "--trials", "3", "kdv.lt2"]
    assert run_cli(argv) == run_cli(argv)


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.chdir(CORPUS_DIR)
    argv = ("shlie-verify", "--jet-order", "0", "--trials", "2", "--format", "json", "kdv.tower")
    monkeypatch.setenv("JETLIFT_SEED", "5")
    first = run(capsys, *argv)
    second = run(capsys, *argv, "--seed", "5")
    assert first == second and first[0] == 0


def test_mutated_inputs_never_crash(capsys):
    import random

    rng = random.Random(99)
    for _ in range(100):
        kind, dim, arity, text = rng.choice(CORPUS)
        cmd = {"lf": "euler", "ldo": "char", "hform": "dh", "oform": "dop"}[kind]
        bad = mutate(rng, text)
        code, _, err = run(capsys, cmd, "--dim", str(dim), "--arity", str(arity), "--", bad)
        assert code in (0, 1, 2)
        if code == 2:
            assert err.startswith("error:")
