"""Exact local differential operators on jet spaces, their lifts to the
horizontal complex, and sh-Lie brackets built from them."""

from .horiforms import HorizontalForm, dH, euler, invert_dH_1d, variational_derivative
from .jetalgebra import LocalFunction
from .ldocalc import (
    Ldo,
    adjoint,
    apply,
    characteristic,
    check_crux,
    compose,
    euler_operator,
    extend_minimal,
    sym_action,
    theta,
)
from .lifting import DEndElement, a0, delta, is_liftable, lift, lift_null, solve_delta
from .opcomplex import OperatorForm, d_op, koszul_solve, reduce_top, solve_d
from .shlie import (
    ShLieTower,
    build_tower,
    check_poisson_conditions,
    jacobiator,
    kdv_bracket,
    verify_shlie,
)
from .syntax import ParseError, parse, parse_hform, parse_ldo, parse_local_function, parse_oform

__version__ = "0.1.0"

__all__ = [
    "a0",
    "adjoint",
    "apply",
    "build_tower",
    "characteristic",
    "check_crux",
    "check_poisson_conditions",
    "compose",
    "d_op",
    "delta",
    "DEndElement",
    "dH",
    "euler",
    "euler_operator",
    "extend_minimal",
    "HorizontalForm",
    "invert_dH_1d",
    "is_liftable",
    "jacobiator",
    "kdv_bracket",
    "koszul_solve",
    "Ldo",
    "lift",
    "lift_null",
    "LocalFunction",
    "OperatorForm",
    "parse",
    "parse_hform",
    "parse_ldo",
    "parse_local_function",
    "parse_oform",
    "ParseError",
    "reduce_top",
    "ShLieTower",
    "solve_d",
    "solve_delta",
    "sym_action",
    "theta",
    "variational_derivative",
    "verify_shlie",
]
