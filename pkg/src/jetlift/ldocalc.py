"""Symbol calculus for multilinear local differential operators.

A term of an arity-``n`` operator is stored as ``(xi, eta) -> coefficient`` where
``xi`` holds one multi-index per slot (total-derivative letters) and ``eta`` one
monomial in the vertical letters ``d/du_J`` per slot.  The term means::

    coefficient * prod_j (d/dx)^{xi_j} (d/du)^{eta_j} f_j

In polarized mode the slot-1 entry of ``xi`` is the exponent of the letter
zeta = d/dx_1 + ... + d/dx_n, which acts on the whole product.

Operators may be *truncated*: ``prec = b`` records that only terms whose
vertical letters have order <= b are kept, so the operator is exact on
arguments of jet order <= b.  ``prec = None`` means no truncation.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Sequence

from .jetalgebra import (
    DimensionError,
    LocalFunction,
    lower_index,
    multi_indices,
    raise_index,
    uexp_change,
    uexp_order,
    zero_index,
)


class ArityError(ValueError):
    pass


class ModeError(ValueError):
    """Operation needs the other (polarized / unpolarized) representation."""


class UnsupportedError(ValueError):
    pass


class PrecisionError(ValueError):
    """A truncated operator was applied beyond the jet order it is exact on."""


class ExtensionError(ValueError):
    pass


def _min_prec(*precs):
    finite = [p for p in precs if p is not None]
    return min(finite) if finite else None


def _dec(prec, k=1):
    return None if prec is None else prec - k


def key_eta_order(key) -> int:
    return max((uexp_order(e) for e in key[1]), default=-1)


def _multinomial_splits(e: int, parts: int):
    """Yield (c_1..c_parts, e!/prod c!) over compositions of e."""
    if parts == 1:
        yield (e,), 1
        return
    for first in range(e, -1, -1):
        for rest, coef in _multinomial_splits(e - first, parts - 1):
            yield (first,) + rest, coef * math.comb(e, first)


class _Accumulator:
    """Sums ``scalar * coefficient`` per key without building intermediate functions."""

    __slots__ = ("data",)

    def __init__(self):
        self.data: dict = {}

    def add(self, key, f: LocalFunction, scalar=1) -> None:
        bucket = self.data.setdefault(key, {})
        for mono, c in f.terms.items():
            bucket[mono] = bucket.get(mono, 0) + c * scalar

    def result(self, dim: int) -> dict:
        out = {}
        for key, bucket in self.data.items():
            f = LocalFunction(dim, bucket)
            if f:
                out[key] = f
        return out


@lru_cache(maxsize=None)
def _lead_expansions(lead: tuple, n: int, sign: int) -> tuple:
    """Expand ``(y_1 + sign*y_2 + ... + sign*y_n)^lead`` axis by axis.

    Returns ``((exponent of y_1, ..., exponent of y_n), integer coefficient)``
    pairs with each exponent a multi-index.
    """
    N = len(lead)
    expansions = [((zero_index(N),) * n, 1)]
    for axis in range(N):
        e = lead[axis]
        if not e:
            continue
        nxt = []
        for base, coef in expansions:
            for split, mult in _multinomial_splits(e, n):
                s = coef * mult * (sign ** (e - split[0]))
                new = tuple(
                    base[k][:axis] + (base[k][axis] + split[k],) + base[k][axis + 1:]
                    for k in range(n)
                )
                nxt.append((new, s))
        expansions = nxt
    return tuple(expansions)


def _add_index(a, b):
    return tuple(p + q for p, q in zip(a, b))


class Ldo:
    """An ``arity``-linear local differential operator over ``R^dim``."""

    __slots__ = ("dim", "arity", "polarized", "prec", "terms")

    def __init__(self, dim: int, arity: int, terms: dict | None = None,
                 polarized: bool = False, prec: int | None = None):
        if arity < 1:
            raise ArityError("arity must be >= 1")
        self.dim = dim
        self.arity = arity
        self.polarized = polarized
        self.prec = prec
        self.terms = {}
        if terms:
            for k, c in terms.items():
                if c and (prec is None or key_eta_order(k) <= prec):
                    self.terms[k] = c

    __hash__ = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, dim, arity, polarized=False, prec=None):
        return cls(dim, arity, polarized=polarized, prec=prec)

    @classmethod
    def empty_key(cls, dim, arity):
        return ((zero_index(dim),) * arity, ((),) * arity)

    @classmethod
    def multiplication(cls, f: LocalFunction, arity: int = 1) -> Ldo:
        """``(f_1..f_n) -> f * f_1 * ... * f_n``."""
        return cls(f.dim, arity, {cls.empty_key(f.dim, arity): f})

    @classmethod
    def identity(cls, dim: int) -> Ldo:
        return cls.multiplication(LocalFunction.one(dim), 1)

    @classmethod
    def total(cls, dim: int, arity: int, slot: int, axis: int) -> Ldo:
        """The letter d/dx^axis acting on argument ``slot``."""
        _check_slot(arity, slot)
        _check_axis(dim, axis)
        xi = [zero_index(dim)] * arity
        xi[slot - 1] = raise_index(xi[slot - 1], axis)
        return cls(dim, arity, {(tuple(xi), ((),) * arity): LocalFunction.one(dim)})

    @classmethod
    def vertical(cls, dim: int, arity: int, slot: int, J) -> Ldo:
        """The letter d/du_J acting on argument ``slot``."""
        _check_slot(arity, slot)
        J = tuple(J)
        if len(J) != dim or min(J, default=0) < 0:
            raise DimensionError(f"multi-index {J} invalid for N={dim}")
        eta = [()] * arity
        eta[slot - 1] = ((J, 1),)
        return cls(dim, arity, {((zero_index(dim),) * arity, tuple(eta)): LocalFunction.one(dim)})

    @classmethod
    def zeta(cls, dim: int, arity: int, axis: int) -> Ldo:
        """The polarized letter zeta^axis (total derivative of the product)."""
        _check_axis(dim, axis)
        xi = [zero_index(dim)] * arity
        xi[0] = raise_index(xi[0], axis)
        return cls(dim, arity, {(tuple(xi), ((),) * arity): LocalFunction.one(dim)},
                   polarized=True)

    # basic structure ----------------------------------------------------
    def _like(self, terms=None, prec="same", polarized=None) -> Ldo:
        return Ldo(self.dim, self.arity, terms,
                   self.polarized if polarized is None else polarized,
                   self.prec if prec == "same" else prec)

    def _compatible(self, other: Ldo) -> Ldo:
        if not isinstance(other, Ldo):
            raise TypeError(f"expected Ldo, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"N mismatch: {self.dim} vs {other.dim}")
        if other.arity != self.arity:
            raise ArityError(f"arity mismatch: {self.arity} vs {other.arity}")
        return other.to_mode(self.polarized)

    def __add__(self, other):
        other = self._compatible(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc[k] + c if k in acc else c
        return self._like(acc, prec=_min_prec(self.prec, other.prec))

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._compatible(other))

    def scale(self, c) -> Ldo:
        """Left multiplication by a rational or a local function."""
        if isinstance(c, LocalFunction):
            return self._like({k: c * q for k, q in self.terms.items()})
        c = Fraction(c)
        return self._like({k: q.scale(c) for k, q in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, Ldo):
            return NotImplemented
        if other.dim != self.dim or other.arity != self.arity:
            return False
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def truncate(self, prec: int | None) -> Ldo:
        return self._like(self.terms, prec=_min_prec(self.prec, prec))

    def with_prec(self, prec: int | None) -> Ldo:
        """Declare a precision (used for operators built from exact finite data)."""
        return self._like(self.terms, prec=prec)

    def is_horizontal(self) -> bool:
        return all(not any(eta) for _, eta in self.terms)

    def has_zeta(self) -> bool:
        return self.polarized and any(any(xi[0]) for xi, _ in self.terms)

    def zeta_degree(self) -> int:
        if not self.polarized:
            raise ModeError("zeta degree needs polarized form")
        return max((sum(xi[0]) for xi, _ in self.terms), default=-1)

    def max_xi_order(self) -> int:
        return max((max(sum(I) for I in xi) for xi, _ in self.terms), default=0)

    def coefficient_jet_order(self) -> int:
        return max((c.jet_order() for c in self.terms.values()), default=-1)

    def out_jet(self, b: int) -> int:
        """Jet order bound of the output for arguments of jet order <= b."""
        A = self.to_mode(False)
        best = -1
        for key, c in A.terms.items():
            if key_eta_order(key) <= b:
                best = max(best, c.jet_order(), b + max(sum(I) for I in key[0]))
        return best

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def __str__(self):
        from .syntax import format_ldo

        return format_ldo(self)

    def __repr__(self):
        tag = "polarized " if self.polarized else ""
        return f"<{tag}Ldo N={self.dim} n={self.arity} prec={self.prec}: {self}>"

    # polarization -------------------------------------------------------
    def to_mode(self, polarized: bool) -> Ldo:
        if polarized == self.polarized:
            return self
        return self.polarize() if polarized else self.depolarize()

    def polarize(self) -> Ldo:
        """Substitute xi_1 = zeta - xi_2 - ... - xi_n."""
        if self.polarized:
            raise ModeError("already polarized")
        if self.arity == 1:
            return self._like(self.terms, polarized=True)
        return self._substitute(sign=-1, polarized=True)

    def depolarize(self) -> Ldo:
        """Substitute zeta = xi_1 + ... + xi_n."""
        if not self.polarized:
            raise ModeError("not polarized")
        if self.arity == 1:
            return self._like(self.terms, polarized=False)
        return self._substitute(sign=1, polarized=False)

    def _substitute(self, sign: int, polarized: bool) -> Ldo:
        # slot 1's letter is expanded into n parts: the new slot-1 letter and
        # one part per remaining slot; parts 2..n carry ``sign``.
        n, N = self.arity, self.dim
        acc = _Accumulator()
        for (xi, eta), c in self.terms.items():
            for add, s in _lead_expansions(xi[0], n, sign):
                new_xi = (add[0],) + tuple(_add_index(xi[k], add[k]) for k in range(1, n))
                acc.add((new_xi, eta), c, s)
        return self._like(acc.result(N), polarized=polarized)

    # letters acting from the left ----------------------------------------
    def left_total(self, axis: int) -> Ldo:
        """``d/dx^axis o A`` in the current representation."""
        _check_axis(self.dim, axis)
        acc: dict = {}

        def put(k, c):
            acc[k] = acc[k] + c if k in acc else c

        for (xi, eta), c in self.terms.items():
            put((xi, eta), c.total_derivative(axis))
            slots = (0,) if self.polarized else range(self.arity)
            for k in slots:
                new_xi = xi[:k] + (raise_index(xi[k], axis),) + xi[k + 1:]
                put((new_xi, eta), c)
        return self._like(acc)

    def left_vertical(self, J) -> Ldo:
        """``d/du_J o A``; moves the vertical letter through the totals by
        d/du_K (d/dx)^I = sum_L C(I,L) (d/dx)^(I-L) d/du_(K-L)."""
        if self.polarized:
            raise ModeError("left_vertical needs unpolarized form")
        J = tuple(J)
        acc: dict = {}

        def put(k, c):
            acc[k] = acc[k] + c if k in acc else c

        for (xi, eta), c in self.terms.items():
            dc = c.partial_u(J)
            if dc:
                put((xi, eta), dc)
            for k in range(self.arity):
                I = xi[k]
                ranges = [range(min(a, b) + 1) for a, b in zip(I, J)]
                for L in iproduct(*ranges):
                    mult = 1
                    for a, l in zip(I, L):
                        mult *= math.comb(a, l)
                    K = tuple(a - l for a, l in zip(J, L))
                    new_xi = xi[:k] + (tuple(a - l for a, l in zip(I, L)),) + xi[k + 1:]
                    new_eta = eta[:k] + (uexp_change(eta[k], K, 1),) + eta[k + 1:]
                    put((new_xi, new_eta), c.scale(mult))
        return self._like(acc)

    def right_total(self, axis: int, slot: int) -> Ldo:
        """``A o d/dx^axis_slot``; loses one order of precision."""
        _check_axis(self.dim, axis)
        _check_slot(self.arity, slot)
        j = slot - 1
        acc: dict = {}

        def put(k, c):
            acc[k] = acc[k] + c if k in acc else c

        for (xi, eta), c in self.terms.items():
            if self.polarized and j == 0:
                put(((raise_index(xi[0], axis),) + xi[1:], eta), c)
                for k in range(1, self.arity):
                    put((xi[:k] + (raise_index(xi[k], axis),) + xi[k + 1:], eta), -c)
            else:
                put((xi[:j] + (raise_index(xi[j], axis),) + xi[j + 1:], eta), c)
            for new_mono, mult in _theta_monomial(eta[j], axis):
                put((xi, eta[:j] + (new_mono,) + eta[j + 1:]), c.scale(mult))
        return self._like(acc, prec=_dec(self.prec))

    def map_coefficients(self, fn) -> Ldo:
        return self._like({k: fn(c) for k, c in self.terms.items()})

    def multiply_letter(self, axis: int, slot: int) -> Ldo:
        """Symbol multiplication ``xi^axis_slot * sigma`` (no commutation)."""
        j = slot - 1
        return self._like({
            (xi[:j] + (raise_index(xi[j], axis),) + xi[j + 1:], eta): c
            for (xi, eta), c in self.terms.items()
        })

    # evaluation ---------------------------------------------------------
    def apply(self, args: Sequence[LocalFunction]) -> LocalFunction:
        return apply(self, args)


def _check_slot(arity, slot):
    if not 1 <= slot <= arity:
        raise ArityError(f"slot {slot} out of range 1..{arity}")


def _check_axis(dim, axis):
    if not 1 <= axis <= dim:
        raise DimensionError(f"axis {axis} out of range 1..{dim}")


def _theta_monomial(mono, axis):
    """Theta^axis on one eta monomial: list of (monomial, multiplicity)."""
    out = []
    for J, m in mono:
        K = lower_index(J, axis)
        if K is None:
            continue
        out.append((uexp_change(uexp_change(mono, J, -1), K, 1), m))
    return out


# ---------------------------------------------------------------------------
# operations


def apply(A: Ldo, args: Sequence[LocalFunction]) -> LocalFunction:
    """Evaluate ``A(f_1, ..., f_n)`` exactly."""
    if len(args) != A.arity:
        raise ArityError(f"expected {A.arity} arguments, got {len(args)}")
    for f in args:
        if f.dim != A.dim:
            raise DimensionError("argument dimension mismatch")
        if A.prec is not None and f.jet_order() > A.prec:
            raise PrecisionError(
                f"operator is exact up to jet order {A.prec}, argument has {f.jet_order()}")
    A = A.to_mode(False)
    cache: dict = {}

    def factor(k, I, alpha):
        key = (k, I, alpha)
        if key not in cache:
            g = args[k]
            for J, m in alpha:
                for _ in range(m):
                    g = g.partial_u(J)
            cache[key] = g.total_derivative_multi(I)
        return cache[key]

    out = LocalFunction.zero(A.dim)
    for (xi, eta), c in A.terms.items():
        val = c
        for k in range(A.arity):
            val = val * factor(k, xi[k], eta[k])
            if not val:
                break
        out = out + val
    return out


def _compose_prec(A: Ldo, inners: Sequence[Ldo]):
    if A.prec is None and all(B.prec is None for B in inners):
        return None
    inner_finite = [B.prec for B in inners if B.prec is not None]
    if A.prec is None:
        return min(inner_finite)
    limit = min(inner_finite) if inner_finite else A.prec
    for b in range(limit, -2, -1):
        if all(B.out_jet(b) <= A.prec for B in inners):
            return b
    return -1


def compose(A: Ldo, inners: Sequence[Ldo]) -> Ldo:
    """Operadic composite ``A(B_1(...), ..., B_l(...))`` in normal form."""
    if len(inners) != A.arity:
        raise ArityError(f"expected {A.arity} inner operators, got {len(inners)}")
    for B in (A, *inners):
        if B.dim != A.dim:
            raise DimensionError("dimension mismatch in compose")
        if B.polarized:
            raise ModeError("compose needs unpolarized operands")
    prec = _compose_prec(A, inners)
    inners = [B.truncate(prec) if prec is not None else B for B in inners]
    caches = [dict() for _ in inners]

    def vertical_part(j, alpha):
        cache = caches[j]
        if ("v", alpha) not in cache:
            if not alpha:
                res = inners[j]
            else:
                J = alpha[-1][0]
                rest = uexp_change(alpha, J, -1)
                res = vertical_part(j, rest).left_vertical(J).truncate(prec)
            cache[("v", alpha)] = res
        return cache[("v", alpha)]

    def slot_operator(j, I, alpha):
        cache = caches[j]
        if (I, alpha) not in cache:
            if not any(I):
                res = vertical_part(j, alpha)
            else:
                axis = next(a for a, e in enumerate(I, start=1) if e)
                lower = I[: axis - 1] + (I[axis - 1] - 1,) + I[axis:]
                res = slot_operator(j, lower, alpha).left_total(axis)
            cache[(I, alpha)] = res
        return cache[(I, alpha)]

    total_arity = sum(B.arity for B in inners)
    acc = _Accumulator()
    for (xi, eta), p in A.terms.items():
        partial = {((), ()): p}
        for j in range(A.arity):
            op = slot_operator(j, xi[j], eta[j])
            nxt = _Accumulator()
            for (pxi, peta), pc in partial.items():
                for (oxi, oeta), oc in op.terms.items():
                    nxt.add((pxi + oxi, peta + oeta), pc * oc)
            partial = nxt.result(A.dim)
            if not partial:
                break
        for key, val in partial.items():
            acc.add(key, val)
    return Ldo(A.dim, total_arity, acc.result(A.dim), prec=prec)


def sym_action(sigma: Sequence[int], A: Ldo) -> Ldo:
    """``(sigma A)(f_1..f_n) = A(f_{sigma^-1(1)}, ..., f_{sigma^-1(n)})``.

    ``sigma`` is given by its images: ``sigma[m-1] = sigma(m)``, 1-based.
    """
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(1, A.arity + 1)):
        raise ArityError(f"{sigma} is not a permutation of 1..{A.arity}")
    # argument f_m lands in A's slot sigma(m)
    if not A.polarized:
        acc = {}
        for (xi, eta), c in A.terms.items():
            new_xi = tuple(xi[s - 1] for s in sigma)
            new_eta = tuple(eta[s - 1] for s in sigma)
            acc[(new_xi, new_eta)] = c
        return A._like(acc)
    # polarized: zeta is symmetric; the letter landing in slot 1 is
    # re-expressed as zeta - xi_2 - ... - xi_n
    n, N = A.arity, A.dim
    zero = zero_index(N)
    acc = _Accumulator()
    for (xi, eta), c in A.terms.items():
        moved = [zero if s == 1 else xi[s - 1] for s in sigma]
        new_eta = tuple(eta[s - 1] for s in sigma)
        if not any(moved[0]):
            acc.add(((xi[0],) + tuple(moved[1:]), new_eta), c)
            continue
        for add, mult in _lead_expansions(moved[0], n, -1):
            new_xi = (_add_index(xi[0], add[0]),) + tuple(
                _add_index(moved[k], add[k]) for k in range(1, n))
            acc.add((new_xi, new_eta), c, mult)
    return A._like(acc.result(N))


def polarize(A: Ldo) -> Ldo:
    return A.polarize()


def depolarize(A: Ldo) -> Ldo:
    return A.depolarize()


def characteristic(A: Ldo) -> Ldo:
    """Integrate the zeta letters by parts onto the coefficient.

    Returned in the representation of the input; the result has no zeta
    (equivalently no slot-1 total derivative), so both representations
    share the same terms.
    """
    P = A.to_mode(True)
    acc: dict = {}
    for (xi, eta), c in P.terms.items():
        I = xi[0]
        val = c.total_derivative_multi(I)
        if sum(I) % 2:
            val = -val
        key = ((zero_index(A.dim),) + xi[1:], eta)
        acc[key] = acc[key] + val if key in acc else val
    return Ldo(A.dim, A.arity, acc, polarized=A.polarized, prec=A.prec)


def adjoint(A: Ldo) -> Ldo:
    """Formal adjoint sum (-1)^|I| (d/dx)^I o a_I of a horizontal linear operator."""
    if A.arity != 1:
        raise UnsupportedError("adjoint is defined for linear operators only")
    A = A.to_mode(False)
    if not A.is_horizontal():
        raise UnsupportedError("adjoint is defined for operators without vertical letters")
    out = Ldo.zero(A.dim, 1, prec=A.prec)
    for (xi, _), c in A.terms.items():
        term = Ldo.multiplication(c)
        for axis, e in enumerate(xi[0], start=1):
            for _ in range(e):
                term = term.left_total(axis)
        out = out + (term if sum(xi[0]) % 2 == 0 else -term)
    return out


def theta(axis: int, slot: int, A: Ldo) -> Ldo:
    """The derivation eta^slot_J -> eta^slot_{J/axis} on symbols."""
    _check_axis(A.dim, axis)
    _check_slot(A.arity, slot)
    j = slot - 1
    acc: dict = {}
    for (xi, eta), c in A.terms.items():
        for mono, mult in _theta_monomial(eta[j], axis):
            key = (xi, eta[:j] + (mono,) + eta[j + 1:])
            val = c.scale(mult)
            acc[key] = acc[key] + val if key in acc else val
    return A._like(acc, prec=_dec(A.prec))


def coefficient_derivative(axis: int, A: Ldo) -> Ldo:
    """Total derivative applied to the coefficients only (letters untouched)."""
    return A.map_coefficients(lambda c: c.total_derivative(axis))


def euler_operator(dim: int, order: int) -> Ldo:
    """The Euler operator sum_I (-1)^|I| (d/dx)^I d/du_I, truncated at jet order ``order``."""
    terms = {}
    for I in multi_indices(dim, order):
        coef = LocalFunction.const(dim, -1 if sum(I) % 2 else 1)
        terms[((I,), (((I, 1),),))] = coef
    return Ldo(dim, 1, terms, prec=order)


# ---------------------------------------------------------------------------
# the multilinear characteristic equations


@dataclass
class CruxReport:
    """Residuals of the characteristic equations, per axis.

    ``sum_residual[i]`` is ``sum_j Theta^i_j chi - d/dx^i chi`` and
    ``slot_residual[(i, j)]`` is ``Theta^i_j chi + xi^i_j * chi`` for j >= 2.
    """

    chi: Ldo
    sum_residual: dict = field(default_factory=dict)
    slot_residual: dict = field(default_factory=dict)

    @property
    def sum_ok(self) -> dict:
        return {i: r.is_zero() for i, r in self.sum_residual.items()}

    @property
    def slot_ok(self) -> dict:
        return {k: r.is_zero() for k, r in self.slot_residual.items()}

    @property
    def all_true(self) -> bool:
        return all(self.sum_ok.values()) and all(self.slot_ok.values())


def check_crux(A: Ldo) -> CruxReport:
    if A.arity < 2:
        raise UnsupportedError("check_crux needs arity >= 2; use a0 for linear operators")
    chi = characteristic(A).to_mode(True)
    report = CruxReport(chi=chi)
    for i in range(1, A.dim + 1):
        lhs = theta(i, 1, chi)
        for j in range(2, A.arity + 1):
            lhs = lhs + theta(i, j, chi)
        report.sum_residual[i] = lhs - coefficient_derivative(i, chi)
        for j in range(2, A.arity + 1):
            report.slot_residual[(i, j)] = theta(i, j, chi) + chi.multiply_letter(i, j)
    return report


@dataclass
class Extension:
    chi: Ldo
    unique: bool


def _eta_monomials(N: int, homogeneity: int, bound: int) -> dict:
    """eta monomials of given homogeneity with letters of order <= bound, by weight."""
    letters = list(multi_indices(N, bound))
    out: dict = {}

    def rec(start, left, acc):
        if left == 0:
            mono = tuple(sorted(acc.items()))
            out.setdefault(sum(sum(J) * m for J, m in mono), []).append(mono)
            return
        for idx in range(start, len(letters)):
            J = letters[idx]
            acc[J] = acc.get(J, 0) + 1
            rec(idx, left - 1, acc)
            acc[J] -= 1
            if not acc[J]:
                del acc[J]

    rec(0, homogeneity, {})
    for w in out:
        out[w].sort()
    return out


def extend_minimal(minimal: Ldo, bound: int) -> Extension:
    """Recover the characteristic of a liftable operator from its minimal part.

    ``minimal`` holds the terms whose vertical letters all have order 0.  The
    characteristic equations are solved weight by weight (weight = total order
    of the vertical letters) up to letter order ``bound``.  When a slot carries
    two or more vertical letters the equations leave free directions; these
    are set to zero and ``unique`` is reported False.
    """
    if minimal.arity < 2:
        raise UnsupportedError("extend_minimal needs arity >= 2")
    M = minimal.to_mode(True)
    N, n = M.dim, M.arity
    for (xi, eta), _ in M.terms.items():
        if any(xi[0]) or any(any(J) for mono in eta for J, _ in mono):
            raise ExtensionError("minimal part must have no zeta and only order-0 vertical letters")

    profiles: dict = {}
    for key, c in M.terms.items():
        prof = tuple(sum(m for _, m in mono) for mono in key[1])
        profiles.setdefault(prof, {})[key] = c

    result: dict = {}
    unique = True
    for prof, seed in profiles.items():
        sol, uniq = _extend_profile(N, n, prof, seed, bound)
        unique = unique and uniq
        result.update(sol)
    return Extension(Ldo(N, n, result, polarized=True, prec=bound), unique)


def _extend_profile(N, n, prof, seed, bound):
    monos = [_eta_monomials(N, m, bound) for m in prof]
    max_w = [max(mw) for mw in monos]
    # chi[(weights)][(xi, eta)] = coefficient
    chi: dict = {tuple(0 for _ in prof): dict(seed)}
    unique = True
    zero = LocalFunction.zero(N)

    def rhs(j, i, known, xi, mu):
        # value of the right-hand side at symbol monomial xi * mu
        if j == 0:
            val = known.get((xi, mu), zero).total_derivative(i)
            for k in range(1, n):
                if xi[k][i - 1]:
                    lowered = xi[:k] + (lower_index(xi[k], i),) + xi[k + 1:]
                    val = val + known.get((lowered, mu), zero)
            return val
        if xi[j][i - 1]:
            lowered = xi[:j] + (lower_index(xi[j], i),) + xi[j + 1:]
            return -known.get((lowered, mu), zero)
        return zero

    def xi_support(known, j, i):
        parts = set()
        for (xi, _mu) in known:
            parts.add(xi)
            if j == 0:
                for k in range(1, n):
                    parts.add(xi[:k] + (raise_index(xi[k], i),) + xi[k + 1:])
            else:
                parts.add(xi[:j] + (raise_index(xi[j], i),) + xi[j + 1:])
        return parts

    weights = sorted(iproduct(*[range(w + 1) for w in max_w]), key=lambda w: (sum(w), w))
    for w in weights:
        if sum(w) == 0:
            continue
        unknown_monos = list(iproduct(*[monos[j].get(w[j], []) for j in range(n)]))
        col = {mu: idx for idx, mu in enumerate(unknown_monos)}
        rows = []  # (coeff row dict, xi -> rhs value fn)
        for j in range(n):
            if w[j] == 0:
                continue
            t = w[:j] + (w[j] - 1,) + w[j + 1:]
            known = chi.get(t, {})
            for i in range(1, N + 1):
                for mu in iproduct(*[monos[k].get(t[k], []) for k in range(n)]):
                    # raising a letter of slot j must stay within the bound
                    if uexp_order(mu[j]) > bound - 1:
                        continue
                    row: dict = {}
                    for nu in unknown_monos:
                        for image, mult in _theta_monomial(nu[j], i):
                            if image == mu[j] and nu[:j] == mu[:j] and nu[j + 1:] == mu[j + 1:]:
                                row[col[nu]] = row.get(col[nu], 0) + mult
                    rows.append((row, j, i, known, tuple(mu)))
        xi_parts = set()
        for _, j, i, known, _ in rows:
            xi_parts |= xi_support(known, j, i)
        solved, uniq = _solve_rows(rows, len(unknown_monos), sorted(xi_parts), rhs, zero)
        unique = unique and (uniq or not xi_parts)
        chi[w] = {(xi, unknown_monos[c]): v for (xi, c), v in solved.items() if v}

    # consistency checks for slots without vertical letters
    for j in range(n):
        if prof[j]:
            continue
        for t, known in chi.items():
            for i in range(1, N + 1):
                for xi in xi_support(known, j, i):
                    for (_, mu) in list(known):
                        if max((uexp_order(m) for m in mu), default=-1) > bound - 1:
                            continue
                        if rhs(j, i, known, xi, mu):
                            raise ExtensionError("minimal data inconsistent with the characteristic equations")
    out = {}
    for part in chi.values():
        out.update(part)
    return out, unique


def _solve_rows(rows, ncols, xi_parts, rhs, zero):
    """Exact Gauss-Jordan on the shared integer matrix, one RHS per xi-part."""
    matrix = [[Fraction(r.get(c, 0)) for c in range(ncols)] for r, *_ in rows]
    rhs_vals = [{xi: rhs(j, i, known, xi, mu) for xi in xi_parts} for _, j, i, known, mu in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(matrix)) if matrix[k][c]), None)
        if piv is None:
            continue
        matrix[r], matrix[piv] = matrix[piv], matrix[r]
        rhs_vals[r], rhs_vals[piv] = rhs_vals[piv], rhs_vals[r]
        inv = 1 / matrix[r][c]
        matrix[r] = [v * inv for v in matrix[r]]
        rhs_vals[r] = {xi: v.scale(inv) for xi, v in rhs_vals[r].items()}
        for k in range(len(matrix)):
            if k != r and matrix[k][c]:
                f = matrix[k][c]
                matrix[k] = [a - f * b for a, b in zip(matrix[k], matrix[r])]
                rhs_vals[k] = {xi: rhs_vals[k][xi] - rhs_vals[r][xi].scale(f) for xi in xi_parts}
        pivots.append(c)
        r += 1
    for k in range(r, len(matrix)):
        if any(rhs_vals[k][xi] for xi in xi_parts):
            raise ExtensionError("characteristic equations are inconsistent")
    solved = {}
    for k, c in enumerate(pivots):
        for xi in xi_parts:
            solved[(xi, c)] = rhs_vals[k][xi]
    return solved, len(pivots) == ncols
