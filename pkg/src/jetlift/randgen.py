"""Seeded random local functions, operators and forms for property checks."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .horiforms import HorizontalForm, subsets
from .jetalgebra import LocalFunction, multi_indices, zero_index
from .ldocalc import Ldo, characteristic

DEFAULT_SEED = 20240


def default_seed() -> int:
    return int(os.environ.get("JETLIFT_SEED", DEFAULT_SEED))


def make_rng(seed: int | None = None) -> random.Random:
    return random.Random(default_seed() if seed is None else seed)


@dataclass
class FunctionConfig:
    x_degree: int = 2
    jet_order: int = 3
    max_terms: int = 4
    max_u_factors: int = 2
    coeff_bound: int = 5
    horizontal: bool = False  # no u at all


@dataclass
class LdoConfig:
    max_terms: int = 3
    xi_order: int = 2
    eta_order: int = 2
    eta_letters: int = 1  # vertical letters per slot
    horizontal: bool = False
    coefficient: FunctionConfig = field(
        default_factory=lambda: FunctionConfig(x_degree=1, jet_order=1, max_terms=2, max_u_factors=1))


def _coeff(rng, bound) -> Fraction:
    c = 0
    while c == 0:
        c = rng.randint(-bound, bound)
    if rng.random() < 0.2:
        return Fraction(c, rng.randint(1, 3))
    return Fraction(c)


def random_local_function(rng: random.Random, dim: int, cfg: FunctionConfig | None = None) -> LocalFunction:
    cfg = cfg or FunctionConfig()
    letters = list(multi_indices(dim, cfg.jet_order))
    terms: dict = {}
    for _ in range(rng.randint(1, cfg.max_terms)):
        xe = [0] * dim
        for _ in range(rng.randint(0, cfg.x_degree)):
            xe[rng.randrange(dim)] += 1
        ue: dict = {}
        if not cfg.horizontal:
            for _ in range(rng.randint(0, cfg.max_u_factors)):
                J = rng.choice(letters)
                ue[J] = ue.get(J, 0) + 1
        key = (tuple(xe), tuple(sorted(ue.items())))
        terms[key] = terms.get(key, 0) + _coeff(rng, cfg.coeff_bound)
    return LocalFunction(dim, terms)


def random_ldo(rng: random.Random, dim: int, arity: int, cfg: LdoConfig | None = None) -> Ldo:
    cfg = cfg or LdoConfig()
    xis = list(multi_indices(dim, cfg.xi_order))
    etas = list(multi_indices(dim, cfg.eta_order))
    ccfg = cfg.coefficient
    if cfg.horizontal:
        ccfg = FunctionConfig(**{**ccfg.__dict__, "horizontal": True})
    acc = Ldo.zero(dim, arity)
    for _ in range(rng.randint(1, cfg.max_terms)):
        xi = tuple(rng.choice(xis) for _ in range(arity))
        eta = []
        for _ in range(arity):
            mono: dict = {}
            if not cfg.horizontal:
                for _ in range(rng.randint(0, cfg.eta_letters)):
                    J = rng.choice(etas)
                    mono[J] = mono.get(J, 0) + 1
            eta.append(tuple(sorted(mono.items())))
        coef = random_local_function(rng, dim, ccfg)
        acc = acc + Ldo(dim, arity, {(xi, tuple(eta)): coef})
    return acc


def random_horizontal_ldo(rng: random.Random, dim: int, order: int, x_degree: int = 2) -> Ldo:
    """``sum_{|I| <= order} a_I(x) (d/dx)^I`` with polynomial ``a_I``."""
    cfg = FunctionConfig(x_degree=x_degree, max_terms=2, horizontal=True)
    terms = {}
    for I in multi_indices(dim, order):
        if rng.random() < 0.6:
            terms[((I,), ((),))] = random_local_function(rng, dim, cfg)
    return Ldo(dim, 1, terms)


def random_hform(rng: random.Random, dim: int, degree: int, cfg: FunctionConfig | None = None) -> HorizontalForm:
    comps = {eps: random_local_function(rng, dim, cfg) for eps in subsets(dim, degree)
             if rng.random() < 0.8}
    return HorizontalForm(dim, degree, comps)


def random_oform(rng: random.Random, dim: int, arity: int, degree: int, cfg: LdoConfig | None = None):
    from .opcomplex import OperatorForm

    comps = {eps: random_ldo(rng, dim, arity, cfg) for eps in subsets(dim, degree)
             if rng.random() < 0.8}
    return OperatorForm(dim, arity, degree, comps)


def random_dend(rng: random.Random, dim: int, arity: int, degree: int, cfg: LdoConfig | None = None,
                density: float = 0.4):
    """A sparse DEnd element: each admissible family is present with probability ``density``."""
    from .lifting import DEndElement, eps_vectors, s_range

    fams = {}
    for s in s_range(dim, arity, degree):
        k = dim - s - degree
        for v in eps_vectors(dim, arity, s):
            if 0 <= k <= dim and rng.random() < density:
                fams[(s, v)] = random_oform(rng, dim, arity, k, cfg)
    return DEndElement(dim, arity, degree, fams)


def random_form_tuple(rng: random.Random, dim: int, arity: int, cfg: FunctionConfig | None = None) -> list:
    return [random_hform(rng, dim, rng.randint(0, dim), cfg) for _ in range(arity)]


def random_liftable(rng: random.Random, dim: int, arity: int, cfg: LdoConfig | None = None) -> Ldo:
    """A finite operator with ``a0 = 0``.

    Operators ``B - chi(B)`` always qualify; in arity one, constant
    multiples of the identity and of ``d/du`` do as well.
    """
    B = random_ldo(rng, dim, arity, cfg)
    out = B - characteristic(B)
    if arity == 1:
        c = LocalFunction.const(dim, _coeff(rng, 5))
        out = out + Ldo.multiplication(c)
        if rng.random() < 0.5:
            V = Ldo.vertical(dim, 1, 1, zero_index(dim))
            out = out + V.scale(_coeff(rng, 5))
    return out
