"""Horizontal forms, the horizontal differential and the Euler operator."""

from __future__ import annotations

from itertools import combinations

from .jetalgebra import DimensionError, LocalFunction, multi_indices


class NotExactError(ValueError):
    pass


def insert_sign(i: int, eps: tuple) -> int:
    """Sign of moving ``dx^i`` from the front of ``dx^i ^ dx^eps`` into place."""
    return -1 if sum(1 for l in eps if l < i) % 2 else 1


def insert_index(i: int, eps: tuple) -> tuple:
    return tuple(sorted(eps + (i,)))


def subsets(dim: int, k: int) -> list:
    return [tuple(c) for c in combinations(range(1, dim + 1), k)]


class HorizontalForm:
    """A form ``sum_eps f_eps dx^eps`` of degree ``degree`` on R^dim."""

    __slots__ = ("dim", "degree", "components")

    def __init__(self, dim: int, degree: int, components: dict | None = None):
        if not 0 <= degree <= dim:
            raise DimensionError(f"form degree {degree} out of range 0..{dim}")
        self.dim = dim
        self.degree = degree
        self.components = {}
        for eps, f in (components or {}).items():
            eps = tuple(eps)
            if len(eps) != degree or list(eps) != sorted(set(eps)) or (eps and not 1 <= eps[0] <= eps[-1] <= dim):
                raise DimensionError(f"bad basis element {eps} for degree {degree}")
            if f.dim != dim:
                raise DimensionError("coefficient dimension mismatch")
            if f:
                self.components[eps] = f

    __hash__ = None

    @classmethod
    def function(cls, f: LocalFunction) -> HorizontalForm:
        return cls(f.dim, 0, {(): f})

    @classmethod
    def top(cls, f: LocalFunction) -> HorizontalForm:
        return cls(f.dim, f.dim, {tuple(range(1, f.dim + 1)): f})

    def component(self, eps) -> LocalFunction:
        return self.components.get(tuple(eps), LocalFunction.zero(self.dim))

    def _check(self, other: HorizontalForm) -> None:
        if other.dim != self.dim or other.degree != self.degree:
            raise DimensionError("forms of different dimension or degree")

    def __add__(self, other):
        self._check(other)
        comps = dict(self.components)
        for eps, f in other.components.items():
            comps[eps] = comps[eps] + f if eps in comps else f
        return HorizontalForm(self.dim, self.degree, comps)

    def __neg__(self):
        return HorizontalForm(self.dim, self.degree, {e: -f for e, f in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> HorizontalForm:
        return HorizontalForm(self.dim, self.degree, {e: f * c for e, f in self.components.items()})

    def __eq__(self, other):
        if not isinstance(other, HorizontalForm):
            return NotImplemented
        return (self.dim, self.degree, self.components) == (other.dim, other.degree, other.components)

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def jet_order(self) -> int:
        return max((f.jet_order() for f in self.components.values()), default=-1)

    def __str__(self):
        from .syntax import format_hform

        return format_hform(self)

    def __repr__(self):
        return f"<HorizontalForm N={self.dim} k={self.degree}: {self}>"


def dH(w: HorizontalForm) -> HorizontalForm:
    """``d_H w = sum_i dx^i ^ D_i w``."""
    if w.degree == w.dim:
        return HorizontalForm(w.dim, w.dim)
    comps: dict = {}
    for eps, f in w.components.items():
        for i in range(1, w.dim + 1):
            if i in eps:
                continue
            g = f.total_derivative(i)
            if insert_sign(i, eps) < 0:
                g = -g
            key = insert_index(i, eps)
            comps[key] = comps[key] + g if key in comps else g
    return HorizontalForm(w.dim, w.degree + 1, comps)


def variational_derivative(L: LocalFunction) -> LocalFunction:
    out = LocalFunction.zero(L.dim)
    for I in multi_indices(L.dim, max(L.jet_order(), 0)):
        term = L.partial_u(I)
        if not term:
            continue
        term = term.total_derivative_multi(I)
        out = out - term if sum(I) % 2 else out + term
    return out


def euler(alpha: HorizontalForm) -> LocalFunction:
    """Euler-Lagrange expression of a top-degree form."""
    if alpha.degree != alpha.dim:
        raise DimensionError(f"Euler operator needs a form of degree {alpha.dim}")
    return variational_derivative(alpha.component(range(1, alpha.dim + 1)))


def invert_dH_1d(alpha: HorizontalForm) -> HorizontalForm:
    """Find ``g`` with ``d_H g = alpha`` for a 1-form on the line.

    Integration by parts from the top jet order down: an exact density is
    affine in its highest derivative u_r with a coefficient A depending on
    u_0..u_{r-1}, and subtracting D(int A du_{r-1}) lowers the order.
    """
    if alpha.dim != 1 or alpha.degree != 1:
        raise DimensionError("invert_dH_1d needs a 1-form with N = 1")
    if euler(alpha):
        raise NotExactError("form is not d_H-exact: its Euler-Lagrange expression is nonzero")
    f = alpha.component((1,))
    g = LocalFunction.zero(1)
    while f:
        r = f.jet_order()
        if r < 1:
            # no jet variables left beyond u_0; E(f) = df/du = 0 forces f = f(x)
            if f.jet_order() == 0:
                raise NotExactError("leftover density depends on u")
            G = f.integrate_x(1)
            g = g + G
            f = f - G.total_derivative(1)
            break
        top = (r,)
        A = f.partial_u(top)
        if A.partial_u(top):
            raise NotExactError("density is not affine in its highest derivative")
        G = A.integrate_u((r - 1,))
        g = g + G
        f = f - G.total_derivative(1)
    if f:
        raise NotExactError("integration by parts did not terminate cleanly")
    return HorizontalForm.function(g)


def zero_form(dim: int, degree: int) -> HorizontalForm:
    return HorizontalForm(dim, degree)
