"""The differential polynomial ring Loc(E) over R^N with one fiber coordinate u.

A local function is a finite sum of monomials ``c * x^a * prod_J u_J^m`` with
exact rational ``c``.  Multi-indices are plain tuples of non-negative ints and
axes are 1-based throughout the public API.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

MultiIndex = tuple  # tuple[int, ...] of length N
UExp = tuple  # sorted tuple of (MultiIndex, positive int)
Monomial = tuple  # (x exponents, UExp)


class DimensionError(ValueError):
    """Operands live over different base dimensions, or an index is out of range."""


def order(J: MultiIndex) -> int:
    return sum(J)


def raise_index(J: MultiIndex, i: int) -> MultiIndex:
    """``iJ``: add one derivative in direction ``i``."""
    return J[: i - 1] + (J[i - 1] + 1,) + J[i:]


def lower_index(J: MultiIndex, i: int) -> MultiIndex | None:
    """``J/i``, or None when ``J`` has no derivative in direction ``i``."""
    if J[i - 1] == 0:
        return None
    return J[: i - 1] + (J[i - 1] - 1,) + J[i:]


def zero_index(N: int) -> MultiIndex:
    return (0,) * N


def unit_index(N: int, i: int) -> MultiIndex:
    return tuple(1 if k == i - 1 else 0 for k in range(N))


def multi_indices(N: int, max_order: int) -> Iterator[MultiIndex]:
    """All multi-indices of length N and order <= max_order, by order then lex."""
    for total in range(max_order + 1):
        yield from _compositions(N, total)


def _compositions(N: int, total: int) -> Iterator[MultiIndex]:
    if N == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(N - 1, total - first):
            yield (first,) + rest


def uexp_mul(a: UExp, b: UExp) -> UExp:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for J, m in b:
        merged[J] = merged.get(J, 0) + m
    return tuple(sorted(merged.items()))


def uexp_change(a: UExp, J: MultiIndex, delta: int) -> UExp:
    merged = dict(a)
    m = merged.get(J, 0) + delta
    if m < 0:
        raise ValueError("negative exponent")
    if m:
        merged[J] = m
    else:
        merged.pop(J, None)
    return tuple(sorted(merged.items()))


def uexp_order(a: UExp) -> int:
    """Largest |J| among the letters, -1 when there are none."""
    return max((sum(J) for J, _ in a), default=-1)


def _check_axis(N: int, i: int) -> None:
    if not 1 <= i <= N:
        raise DimensionError(f"axis {i} out of range 1..{N}")


class LocalFunction:
    """Exact polynomial in ``x^1..x^N`` and finitely many jet variables ``u_J``.

    Instances are immutable; ``terms`` maps ``(xexp, uexp)`` to a nonzero
    :class:`fractions.Fraction`.
    """

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: dict | None = None):
        self.dim = dim
        self.terms = {} if terms is None else {k: v for k, v in terms.items() if v}
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, dim: int, c) -> LocalFunction:
        return cls(dim, {(zero_index(dim), ()): Fraction(c)})

    @classmethod
    def zero(cls, dim: int) -> LocalFunction:
        return cls(dim)

    @classmethod
    def one(cls, dim: int) -> LocalFunction:
        return cls.const(dim, 1)

    @classmethod
    def x(cls, dim: int, i: int) -> LocalFunction:
        _check_axis(dim, i)
        return cls(dim, {(unit_index(dim, i), ()): Fraction(1)})

    @classmethod
    def u(cls, dim: int, J: Iterable[int] | None = None) -> LocalFunction:
        J = zero_index(dim) if J is None else tuple(J)
        if len(J) != dim or min(J, default=0) < 0:
            raise DimensionError(f"multi-index {J} invalid for N={dim}")
        return cls(dim, {(zero_index(dim), ((J, 1),)): Fraction(1)})

    @classmethod
    def _from_iter(cls, dim: int, items: Iterable) -> LocalFunction:
        acc: dict = {}
        for k, v in items:
            acc[k] = acc.get(k, 0) + v
        return cls(dim, acc)

    # ring structure -----------------------------------------------------
    def _coerce(self, other) -> LocalFunction:
        if isinstance(other, LocalFunction):
            if other.dim != self.dim:
                raise DimensionError(f"N mismatch: {self.dim} vs {other.dim}")
            return other
        if isinstance(other, (int, Fraction)):
            return LocalFunction.const(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return LocalFunction(self.dim, acc)

    __radd__ = __add__

    def __neg__(self):
        return LocalFunction(self.dim, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict = {}
        for (xa, ua), ca in self.terms.items():
            for (xb, ub), cb in other.terms.items():
                key = (tuple(p + q for p, q in zip(xa, xb)), uexp_mul(ua, ub))
                acc[key] = acc.get(key, 0) + ca * cb
        return LocalFunction(self.dim, acc)

    __rmul__ = __mul__

    def scale(self, c) -> LocalFunction:
        c = Fraction(c)
        if not c:
            return LocalFunction(self.dim)
        return LocalFunction(self.dim, {k: v * c for k, v in self.terms.items()})

    def __pow__(self, e: int) -> LocalFunction:
        out = LocalFunction.one(self.dim)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LocalFunction.const(self.dim, other)
        if not isinstance(other, LocalFunction):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        z = zero_index(self.dim)
        return all(k == (z, ()) for k in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((zero_index(self.dim), ()), Fraction(0))

    def jet_order(self) -> int:
        """Largest |J| of a jet variable present; -1 if ``u`` does not occur."""
        return max((uexp_order(ue) for _, ue in self.terms), default=-1)

    def x_degree(self) -> int:
        return max((sum(xe) for xe, _ in self.terms), default=0)

    def variables(self) -> set:
        return {J for _, ue in self.terms for J, _ in ue}

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: monomial_sort_key(kv[0]))

    def __str__(self):
        from .syntax import format_local_function

        return format_local_function(self)

    def __repr__(self):
        return f"LocalFunction({str(self)!r})"

    # derivatives --------------------------------------------------------
    def partial_x(self, i: int) -> LocalFunction:
        _check_axis(self.dim, i)
        acc: dict = {}
        for (xe, ue), c in self.terms.items():
            e = xe[i - 1]
            if e:
                key = (xe[: i - 1] + (e - 1,) + xe[i:], ue)
                acc[key] = acc.get(key, 0) + c * e
        return LocalFunction(self.dim, acc)

    def partial_u(self, J: MultiIndex) -> LocalFunction:
        J = tuple(J)
        if len(J) != self.dim:
            raise DimensionError(f"multi-index {J} invalid for N={self.dim}")
        acc: dict = {}
        for (xe, ue), c in self.terms.items():
            m = dict(ue).get(J, 0)
            if m:
                key = (xe, uexp_change(ue, J, -1))
                acc[key] = acc.get(key, 0) + c * m
        return LocalFunction(self.dim, acc)

    def total_derivative(self, i: int) -> LocalFunction:
        """``d/dx^i = d/dx^i + sum_J u_{iJ} d/du_J``."""
        _check_axis(self.dim, i)
        acc: dict = {}
        for (xe, ue), c in self.terms.items():
            e = xe[i - 1]
            if e:
                key = (xe[: i - 1] + (e - 1,) + xe[i:], ue)
                acc[key] = acc.get(key, 0) + c * e
            for J, m in ue:
                lowered = uexp_change(ue, J, -1)
                key = (xe, uexp_change(lowered, raise_index(J, i), 1))
                acc[key] = acc.get(key, 0) + c * m
        return LocalFunction(self.dim, acc)

    def total_derivative_multi(self, I: MultiIndex) -> LocalFunction:
        f = self
        for axis, k in enumerate(I, start=1):
            for _ in range(k):
                f = f.total_derivative(axis)
        return f

    # antiderivatives (used by the 1-D inversion of d_H) -------------------
    def integrate_u(self, J: MultiIndex) -> LocalFunction:
        J = tuple(J)
        acc: dict = {}
        for (xe, ue), c in self.terms.items():
            m = dict(ue).get(J, 0)
            acc[(xe, uexp_change(ue, J, 1))] = c / (m + 1)
        return LocalFunction(self.dim, acc)

    def integrate_x(self, i: int) -> LocalFunction:
        _check_axis(self.dim, i)
        acc: dict = {}
        for (xe, ue), c in self.terms.items():
            e = xe[i - 1]
            acc[(xe[: i - 1] + (e + 1,) + xe[i:], ue)] = c / (e + 1)
        return LocalFunction(self.dim, acc)


def monomial_sort_key(mono: Monomial):
    xe, ue = mono
    return (xe, ue)


def lf_add(f: LocalFunction, g: LocalFunction) -> LocalFunction:
    return f + g


def lf_mul(f: LocalFunction, g: LocalFunction) -> LocalFunction:
    return f * g


def lf_scale(f: LocalFunction, g) -> LocalFunction:
    return f * g


def partial_x(i: int, f: LocalFunction) -> LocalFunction:
    return f.partial_x(i)


def partial_u(J: MultiIndex, f: LocalFunction) -> LocalFunction:
    return f.partial_u(J)


def total_derivative(i: int, f: LocalFunction) -> LocalFunction:
    return f.total_derivative(i)
