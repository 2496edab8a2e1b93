"""Command-line front end: ``jetlift <command> [flags] [inputs...]``.

Inputs are expressions in the text grammar, paths to files holding text or
JSON, or ``-`` for stdin (the default when no input is given).  Exit codes:
0 success or a true answer, 1 a mathematical negative, 2 usage or parse
errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import serialize
from .horiforms import HorizontalForm, NotExactError, dH, euler, invert_dH_1d
from .jetalgebra import DimensionError, LocalFunction
from .ldocalc import (
    ArityError,
    ExtensionError,
    Ldo,
    ModeError,
    PrecisionError,
    UnsupportedError,
    adjoint,
    apply,
    characteristic,
    check_crux,
    compose,
    theta,
)
from .lifting import (
    DEndElement,
    NotCycleError,
    NotLiftableError,
    a0,
    delta,
    lift,
    solve_delta,
)
from .opcomplex import NotClosedError, NotSolvableError, OperatorForm, d_op, reduce_top, solve_d
from .randgen import FunctionConfig
from .shlie import (
    ConditionError,
    ShLieTower,
    build_tower,
    check_poisson_conditions,
    jacobiator,
    kdv_bracket,
    skew_symmetrize,
    verify_shlie,
)
from .syntax import ParseError, parse_hform, parse_ldo, parse_local_function, parse_oform

KDV_ORDER = 12

USAGE_ERRORS = (ParseError, serialize.FormatError, DimensionError, ArityError, ModeError,
                UnsupportedError, PrecisionError, ExtensionError, OSError)
NEGATIVES = (NotLiftableError, NotClosedError, NotSolvableError, NotExactError,
             NotCycleError, ConditionError)


class UsageError(ValueError):
    pass


class Negative(Exception):
    """A well-formed request whose mathematical answer is "no"."""

    def __init__(self, payload):
        super().__init__("negative")
        self.payload = payload


# ---------------------------------------------------------------------------
# reading inputs


def _read_text(source: str | None) -> str:
    if source is None or source == "-":
        return sys.stdin.read()
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    return source


def _is_json(text: str) -> bool:
    return text.lstrip().startswith("{")


def _load(source, kind, parser):
    text = _read_text(source)
    if _is_json(text):
        return serialize.loads(text, kind)
    return parser(text)


def read_ldo(source, args, arity=None) -> Ldo:
    n = args.arity if arity is None else arity
    A = _load(source, "ldo", lambda t: parse_ldo(t, args.dim, n))
    if A.dim != args.dim:
        raise DimensionError(f"operator has N={A.dim}, expected {args.dim}")
    return A


def read_lf(source, args) -> LocalFunction:
    return _load(source, "lf", lambda t: parse_local_function(t, args.dim))


def read_hform(source, args) -> HorizontalForm:
    return _load(source, "hform", lambda t: parse_hform(t, args.dim, args.degree))


def read_oform(source, args) -> OperatorForm:
    return _load(source, "oform", lambda t: parse_oform(t, args.dim, args.arity, args.degree))


def read_dend(source, args) -> DEndElement:
    text = _read_text(source)
    if not _is_json(text):
        raise UsageError("DEnd elements are read from JSON only")
    return serialize.loads(text, "dend")


def read_lt2(source, args) -> Ldo:
    """A bilinear bracket; the literal ``kdv`` gives the truncated KdV bracket."""
    if source is not None and source.strip().lower() == "kdv":
        return kdv_bracket(args.order_bound or KDV_ORDER)
    return read_ldo(source, args, arity=2)


# ---------------------------------------------------------------------------
# writing outputs


def _data(value):
    if isinstance(value, (LocalFunction, Ldo, HorizontalForm, OperatorForm, DEndElement, ShLieTower)):
        return serialize.to_data(value)
    if isinstance(value, dict):
        return {str(k): _data(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_data(v) for v in value]
    return value


def _text(value, indent="") -> str:
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            body = _text(v, indent + "  ")
            if "\n" in body or isinstance(v, dict):
                lines.append(f"{indent}{k}:\n{body}")
            else:
                lines.append(f"{indent}{k}: {body.strip()}")
        return "\n".join(lines)
    if isinstance(value, bool):
        return indent + ("true" if value else "false")
    if isinstance(value, ShLieTower):
        return "\n".join(f"{indent}l{k}:\n{_text(b, indent + '  ')}"
                         for k, b in sorted(value.brackets.items()))
    if isinstance(value, (list, tuple)):
        return "\n".join(_text(v, indent) for v in value)
    text = str(value)
    return "\n".join(indent + line for line in text.split("\n"))


def emit(value, args, out=None) -> None:
    out = out or sys.stdout
    if args.format == "json":
        if isinstance(value, dict) or not hasattr(value, "dim"):
            out.write(json.dumps(_data(value), sort_keys=True) + "\n")
        else:
            out.write(serialize.dumps(value) + "\n")
    else:
        out.write(_text(value) + "\n")


# ---------------------------------------------------------------------------
# commands


def _inputs(args, count=None):
    items = list(args.inputs) or [None]
    if count is not None and len(items) != count:
        raise UsageError(f"{args.command} takes {count} input(s), got {len(items)}")
    return items


def _top_form(source, args) -> OperatorForm:
    F = read_oform(source, args)
    if F.degree == 0 and args.dim > 0 and set(F.components) <= {()}:
        # a bare operator stands for its top-degree form
        A = F.components.get((), Ldo.zero(args.dim, F.arity, polarized=True))
        return OperatorForm.top(A)
    return F


def cmd_apply(args):
    items = _inputs(args)
    if len(items) != args.arity + 1:
        raise UsageError(f"apply needs an operator and {args.arity} function(s)")
    A = read_ldo(items[0], args)
    return apply(A, [read_lf(s, args) for s in items[1:]])


def cmd_compose(args):
    items = _inputs(args)
    if len(items) != args.arity + 1:
        raise UsageError(f"compose needs an outer operator and {args.arity} inner operator(s)")
    arities = [int(a) for a in args.inner_arity.split(",")] if args.inner_arity else [1] * args.arity
    if len(arities) != args.arity:
        raise UsageError("--inner-arity must list one arity per slot")
    outer = read_ldo(items[0], args).to_mode(False)
    inners = [read_ldo(s, args, arity=m).to_mode(False) for s, m in zip(items[1:], arities)]
    return compose(outer, inners)


def cmd_char(args):
    return characteristic(read_ldo(_inputs(args, 1)[0], args)).to_mode(False)


def cmd_adjoint(args):
    return adjoint(read_ldo(_inputs(args, 1)[0], args))


def cmd_theta(args):
    A = read_ldo(_inputs(args, 1)[0], args)
    return theta(args.axis, args.slot, A)


def cmd_crux_check(args):
    rep = check_crux(read_ldo(_inputs(args, 1)[0], args))
    out = {"chi": rep.chi.to_mode(False),
           "sum_ok": {str(i): ok for i, ok in sorted(rep.sum_ok.items())},
           "slot_ok": {f"{i},{j}": ok for (i, j), ok in sorted(rep.slot_ok.items())},
           "all_true": rep.all_true}
    if not rep.all_true:
        raise Negative(out)
    return out


def cmd_dh(args):
    return dH(read_hform(_inputs(args, 1)[0], args))


def cmd_euler(args):
    return euler(read_hform(_inputs(args, 1)[0], args))


def cmd_invert_dh(args):
    return invert_dH_1d(read_hform(_inputs(args, 1)[0], args))


def cmd_dop(args):
    return d_op(read_oform(_inputs(args, 1)[0], args)).unpolarized()


def cmd_reduce_top(args):
    At, chi = reduce_top(_top_form(_inputs(args, 1)[0], args))
    return {"primitive": At.unpolarized(), "chi": chi.unpolarized()}


def cmd_solve_d(args):
    return solve_d(read_oform(_inputs(args, 1)[0], args)).unpolarized()


def cmd_a0(args):
    A = read_ldo(_inputs(args, 1)[0], args)
    return {f"{i},{j}": v.to_mode(False) for (i, j), v in sorted(a0(A).items())}


def cmd_liftable(args):
    A = read_ldo(_inputs(args, 1)[0], args)
    obstruction = {f"{i},{j}": v.to_mode(False) for (i, j), v in sorted(a0(A).items()) if v}
    out = {"liftable": not obstruction, "chi": characteristic(A).to_mode(False)}
    if obstruction:
        out["obstruction"] = obstruction
        raise Negative(out)
    return out


def cmd_lift(args):
    return lift(read_ldo(_inputs(args, 1)[0], args))


def cmd_delta(args):
    return delta(read_dend(_inputs(args, 1)[0], args))


def cmd_solve_delta(args):
    g = read_dend(_inputs(args, 1)[0], args)
    return solve_delta(g, allow_degree_zero=args.allow_degree_zero)


def _poisson(L):
    rep = check_poisson_conditions(L)
    return {"i": rep.i, "ii": rep.ii, "iii": rep.iii, "all_true": rep.all_true}


def cmd_poisson_check(args):
    out = _poisson(read_lt2(_inputs(args, 1)[0], args))
    if not out["all_true"]:
        raise Negative(out)
    return out


def cmd_skew(args):
    return skew_symmetrize(read_lt2(_inputs(args, 1)[0], args)).unpolarized()


def cmd_jacobiator(args):
    source = _inputs(args, 1)[0]
    text = _read_text(source) if source != "kdv" else source
    if _is_json(text) and json.loads(text).get("kind") == "dend":
        l2 = serialize.loads(text, "dend")
    else:
        l2 = build_tower(read_lt2(text, args), kmax=2).bracket(2)
    return jacobiator(l2)


def _report(rep) -> dict:
    return {"trials": rep.trials,
            "checked": {str(n): c for n, c in sorted(rep.checked.items())},
            "failures": {str(n): len(f) for n, f in sorted(rep.failures.items())},
            "passed": rep.passed}


def _cfg(args) -> FunctionConfig:
    return FunctionConfig(jet_order=args.jet_order)


def cmd_shlie_build(args):
    L = read_lt2(_inputs(args, 1)[0], args)
    tower = build_tower(L, kmax=args.kmax)
    if args.no_verify:
        return tower
    rep = verify_shlie(tower, nmax=args.kmax, trials=args.trials, seed=args.seed, cfg=_cfg(args))
    out = {"tower": tower, "verification": _report(rep)}
    if not rep.passed:
        raise Negative(out)
    return out


def cmd_shlie_verify(args):
    text = _read_text(_inputs(args, 1)[0])
    if not _is_json(text):
        raise UsageError("shlie-verify reads a tower JSON document")
    data = json.loads(text)
    tower = serialize.from_data(data.get("tower", data), "tower")
    nmax = min(args.kmax, tower.kmax)
    out = _report(verify_shlie(tower, nmax=nmax, trials=args.trials, seed=args.seed, cfg=_cfg(args)))
    if not out["passed"]:
        raise Negative(out)
    return out


COMMANDS = {
    "apply": (cmd_apply, "evaluate an operator on local functions"),
    "compose": (cmd_compose, "normal-ordered composition A(B_1, ..., B_n)"),
    "char": (cmd_char, "characteristic of an operator"),
    "adjoint": (cmd_adjoint, "formal adjoint of a linear horizontal operator"),
    "theta": (cmd_theta, "the symbol derivation Theta^axis_slot"),
    "crux-check": (cmd_crux_check, "characteristic equations of a multilinear operator"),
    "dh": (cmd_dh, "horizontal differential of a form"),
    "euler": (cmd_euler, "Euler operator on a top-degree form"),
    "invert-dh": (cmd_invert_dh, "primitive of an exact top form over N = 1"),
    "dop": (cmd_dop, "differential of an operator form"),
    "reduce-top": (cmd_reduce_top, "split a top form as d_op(primitive) + chi"),
    "solve-d": (cmd_solve_d, "primitive of a closed operator form below top degree"),
    "a0": (cmd_a0, "liftability obstruction components"),
    "liftable": (cmd_liftable, "decide liftability; exit 1 when not liftable"),
    "lift": (cmd_lift, "lift an operator on top forms to a cycle"),
    "delta": (cmd_delta, "differential of a DEnd element"),
    "solve-delta": (cmd_solve_delta, "primitive of a DEnd cycle"),
    "poisson-check": (cmd_poisson_check, "conditions (i)-(iii) on a bilinear bracket"),
    "skew": (cmd_skew, "skew-symmetrized top-degree bracket"),
    "jacobiator": (cmd_jacobiator, "arity-3 defect of the lifted bracket"),
    "shlie-build": (cmd_shlie_build, "build and verify the bracket tower"),
    "shlie-verify": (cmd_shlie_verify, "verify the relations of a stored tower"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=1, help="base dimension N")
    common.add_argument("--arity", type=int, default=1, help="operator arity n")
    common.add_argument("--degree", type=int, default=None, help="expected form degree")
    common.add_argument("--order-bound", type=int, default=None,
                        help=f"truncation order for the kdv bracket (default {KDV_ORDER})")
    common.add_argument("--seed", type=int, default=None, help="random seed (default JETLIFT_SEED)")
    common.add_argument("--trials", type=int, default=25)
    common.add_argument("--kmax", type=int, default=3)
    common.add_argument("--jet-order", type=int, default=3, help="jet order of random test forms")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--axis", type=int, default=1)
    common.add_argument("--slot", type=int, default=1)
    common.add_argument("--inner-arity", default=None, help="comma list, one per slot")
    common.add_argument("--allow-degree-zero", action="store_true")
    common.add_argument("--no-verify", action="store_true")
    common.add_argument("inputs", nargs="*", help="expressions, files, or - for stdin")

    parser = argparse.ArgumentParser(prog="jetlift", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fn = COMMANDS[args.command][0]
    try:
        emit(fn(args), args)
        return 0
    except Negative as neg:
        emit(neg.payload, args)
        return 1
    except NEGATIVES as exc:
        print(f"no: {exc}", file=sys.stderr)
        return 1
    except (UsageError, *USAGE_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
