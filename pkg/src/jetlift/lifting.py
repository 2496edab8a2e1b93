"""Operator-valued endomorphisms of the regraded horizontal complex and lifts.

Regrading: ``Omega_s`` is the space of horizontal forms of degree ``N - s``,
so ``d_H`` has degree -1.  A degree-``k`` element ``f`` of arity ``n`` is a
family of maps ``f_s : [Omega^{(x)n}]_s -> Omega_{s+k}``.  Its component
``F[s, (eps_1..eps_n)]`` is an operator form of degree ``N - s - k``: it sends
``(g_1 dx^eps_1, ..., g_n dx^eps_n)`` to ``F(g_1, ..., g_n)``.

Sign conventions (checked by ``delta(delta(f)) = 0`` and by pointwise
evaluation in the tests):

* ``d_H`` on a tensor acts on factor ``j`` with sign ``(-1)^(s_1+...+s_{j-1})``
  where ``s_l = N - |eps_l|`` is the regraded degree.
* ``dx^i ^ dx^eps`` is sorted into place with sign ``(-1)^#{l in eps : l < i}``.
* ``(delta f)_s = d_H f_s - (-1)^k f_{s-1} d_H^{(x)n}``.
"""

from __future__ import annotations

from itertools import product as iproduct
from typing import Sequence

from .horiforms import HorizontalForm, dH, insert_index, insert_sign, subsets
from .jetalgebra import DimensionError, LocalFunction
from .ldocalc import Ldo, _min_prec, characteristic
from .opcomplex import (
    NotSolvableError,
    OperatorForm,
    apply_oform,
    d_op,
    reduce_top,
    solve_d,
)


class NotLiftableError(ValueError):
    def __init__(self, message: str, obstruction: dict | None = None):
        super().__init__(message)
        self.obstruction = obstruction or {}


class NotCycleError(ValueError):
    pass


def eps_vectors(dim: int, arity: int, s: int) -> list:
    """All ``(eps_1..eps_n)`` with ``sum |eps_j| = n N - s``."""
    total = arity * dim - s
    per_slot = [[e for k in range(dim + 1) for e in subsets(dim, k)]] * arity
    return [v for v in iproduct(*per_slot) if sum(len(e) for e in v) == total]


def s_range(dim: int, arity: int, degree: int) -> range:
    return range(max(-degree, 0), min(arity * dim, dim - degree) + 1)


def koszul_prefix(dim: int, eps_vec, j: int) -> int:
    """``(-1)^(s_1 + ... + s_{j-1})`` for slot ``j`` (1-based)."""
    return -1 if sum(dim - len(e) for e in eps_vec[: j - 1]) % 2 else 1


class DEndElement:
    """A degree-``degree`` family of operator forms, keyed by ``(s, eps_vec)``."""

    __slots__ = ("dim", "arity", "degree", "families")

    def __init__(self, dim: int, arity: int, degree: int, families: dict | None = None):
        self.dim = dim
        self.arity = arity
        self.degree = degree
        self.families = {}
        allowed = s_range(dim, arity, degree)
        for (s, eps_vec), F in (families or {}).items():
            eps_vec = tuple(tuple(e) for e in eps_vec)
            if s not in allowed or len(eps_vec) != arity:
                raise DimensionError(f"index s={s} outside {allowed} for degree {degree}")
            if sum(len(e) for e in eps_vec) != arity * dim - s:
                raise DimensionError(f"form indices {eps_vec} do not match s={s}")
            if F.degree != dim - s - degree or F.arity != arity or F.dim != dim:
                raise DimensionError(f"component at s={s} has wrong shape")
            if F:
                self.families[(s, eps_vec)] = F

    __hash__ = None

    @property
    def prec(self):
        return _min_prec(*(F.prec for F in self.families.values()))

    def form_degree(self, s: int) -> int:
        return self.dim - s - self.degree

    def component(self, s: int, eps_vec) -> OperatorForm:
        key = (s, tuple(tuple(e) for e in eps_vec))
        if key in self.families:
            return self.families[key]
        return OperatorForm(self.dim, self.arity, max(self.form_degree(s), -1))

    def level(self, s: int) -> dict:
        return {v: F for (t, v), F in self.families.items() if t == s}

    def _check(self, other):
        if (other.dim, other.arity, other.degree) != (self.dim, self.arity, self.degree):
            raise DimensionError("DEnd elements of different shape")

    def __add__(self, other):
        self._check(other)
        fams = dict(self.families)
        for k, F in other.families.items():
            fams[k] = fams[k] + F if k in fams else F
        p = _min_prec(self.prec, other.prec)
        return DEndElement(self.dim, self.arity, self.degree,
                           {k: F.truncate(p) for k, F in fams.items()})

    def __neg__(self):
        return self.map(lambda F: -F)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> DEndElement:
        return self.map(lambda F: F.scale(c))

    def map(self, fn) -> DEndElement:
        return DEndElement(self.dim, self.arity, self.degree,
                           {k: fn(F) for k, F in self.families.items()})

    def truncate(self, prec) -> DEndElement:
        return self.map(lambda F: F.truncate(prec))

    def __eq__(self, other):
        if not isinstance(other, DEndElement):
            return NotImplemented
        if (other.dim, other.arity, other.degree) != (self.dim, self.arity, self.degree):
            return False
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return not self.families

    def __bool__(self):
        return bool(self.families)

    def __str__(self):
        from .syntax import format_dend

        return format_dend(self)

    def __repr__(self):
        return (f"<DEndElement N={self.dim} n={self.arity} k={self.degree} "
                f"components={len(self.families)}>")

    @classmethod
    def constant_diagonal(cls, dim: int, c) -> DEndElement:
        """Arity 1, degree 0: multiplication by the constant ``c`` on every form."""
        A = Ldo.multiplication(LocalFunction.const(dim, c))
        fams = {}
        for s in range(dim + 1):
            for eps in subsets(dim, dim - s):
                fams[(s, (eps,))] = OperatorForm(dim, 1, dim - s, {eps: A})
        return cls(dim, 1, 0, fams)

    @classmethod
    def from_top(cls, A: Ldo) -> DEndElement:
        """Degree 0 element whose only component is ``A`` on top forms."""
        full = tuple(range(1, A.dim + 1))
        return cls(A.dim, A.arity, 0, {(0, (full,) * A.arity): OperatorForm.top(A)})


def pull_component(f: DEndElement, s: int, eps_vec) -> OperatorForm:
    """Component of ``f_{s-1} o d_H^{(x)n}`` at ``(s, eps_vec)``."""
    N = f.dim
    out = OperatorForm(N, f.arity, max(N - s - f.degree + 1, -1))
    if out.degree < 0:
        return out
    for j in range(1, f.arity + 1):
        eps = eps_vec[j - 1]
        sign_j = koszul_prefix(N, eps_vec, j)
        for i in range(1, N + 1):
            if i in eps:
                continue
            bigger = eps_vec[: j - 1] + (insert_index(i, eps),) + eps_vec[j:]
            F = f.families.get((s - 1, bigger))
            if F is None:
                continue
            term = F.map(lambda A, i=i, j=j: A.right_total(i, j))
            if sign_j * insert_sign(i, eps) < 0:
                term = -term
            out = out + term
    return out


def pull(f: DEndElement, s: int) -> dict:
    return {v: pull_component(f, s, v) for v in eps_vectors(f.dim, f.arity, s)}


def delta(f: DEndElement) -> DEndElement:
    """``(delta f)_s = d_op f_s - (-1)^k f_{s-1} o d_H^{(x)n}``; degree k - 1."""
    k = f.degree
    sign = -1 if k % 2 else 1
    fams = {}
    for s in s_range(f.dim, f.arity, k - 1):
        for v in eps_vectors(f.dim, f.arity, s):
            val = pull_component(f, s, v)
            val = -val if sign > 0 else val
            F = f.families.get((s, v))
            if F is not None:
                val = val + d_op(F)
            if val:
                fams[(s, v)] = val
    return DEndElement(f.dim, f.arity, k - 1, fams)


# ---------------------------------------------------------------------------
# liftability


def a0(A: Ldo) -> dict:
    """``a0(A)[(i, j)] = chi(A o d/dx^i_j)``."""
    A = A.to_mode(False)
    return {(i, j): characteristic(A.right_total(i, j))
            for j in range(1, A.arity + 1) for i in range(1, A.dim + 1)}


def is_liftable(A: Ldo) -> bool:
    return all(v.is_zero() for v in a0(A).values())


def lift(A: Ldo) -> DEndElement:
    """A degree-0 cycle ``f`` with ``f_0 = A`` on top forms."""
    obstruction = {k: v for k, v in a0(A).items() if v}
    if obstruction:
        raise NotLiftableError(f"not liftable: chi(A o D^i_j) != 0 for {sorted(obstruction)}",
                               obstruction)
    N, n = A.dim, A.arity
    f = DEndElement.from_top(A.to_mode(True))
    for s in range(1, min(n * N, N) + 1):
        level = {}
        for v in eps_vectors(N, n, s):
            R = pull_component(f, s, v)
            if not R:
                continue
            if R.degree == N:
                Rt, chi = reduce_top(R)
                if chi:
                    raise NotSolvableError("top-degree residual has nonzero characteristic")
                X = Rt
            else:
                X = solve_d(R)
            if X:
                level[(s, v)] = X
        f = DEndElement(N, n, 0, {**f.families, **level})
    _check_residual_vanishes(f)
    return f


def lift_null(A: Ldo) -> DEndElement:
    """Lift of an operator with ``chi(A) = 0``: ``delta(h)`` for ``h_0 = At``.

    Here ``A = d_op(At)``; the result has ``f_1 = At o d_H^{(x)n}`` and no
    components for ``s >= 2``.
    """
    h = null_primitive(A)
    return delta(h)


def null_primitive(A: Ldo) -> DEndElement:
    """Degree-1 ``h`` with ``delta(h) = lift_null(A)`` and ``h_0 = At``."""
    At, chi = reduce_top(OperatorForm.top(A.to_mode(True)))
    if chi:
        raise NotLiftableError("chi(A) != 0")
    full = tuple(range(1, A.dim + 1))
    return DEndElement(A.dim, A.arity, 1, {(0, (full,) * A.arity): At})


def _check_residual_vanishes(f: DEndElement) -> None:
    d = delta(f)
    if d:
        raise NotSolvableError("internal error: constructed family is not a cycle")


def solve_delta(g: DEndElement, allow_degree_zero: bool = False, check: bool = True) -> DEndElement:
    """``h`` of degree ``k + 1`` with ``delta(h) = g`` for a cycle ``g`` of degree ``k``.

    Degree 0 is accepted with ``allow_degree_zero``; it then needs the
    top-degree components ``g_0`` to have vanishing characteristic.
    """
    k = g.degree
    if k < 0 or (k == 0 and not allow_degree_zero):
        raise ValueError(f"solve_delta needs degree >= 1, got {k}")
    if check and delta(g):
        raise NotCycleError("input is not a delta-cycle")
    N, n = g.dim, g.arity
    sign = -1 if (k + 1) % 2 else 1  # (-1)^(k+1)
    h = DEndElement(N, n, k + 1)
    h_range = s_range(N, n, k + 1)
    for s in s_range(N, n, k):
        level = {}
        for v in eps_vectors(N, n, s):
            R = g.component(s, v)
            P = pull_component(h, s, v)
            R = R + (P if sign > 0 else -P) if P.degree == R.degree else R
            if not R:
                continue
            if s not in h_range:
                raise NotSolvableError(f"nonzero residual at s={s} with no unknown to absorb it")
            if R.degree == N:
                Rt, chi = reduce_top(R)
                if chi:
                    raise NotSolvableError("degree-zero defect has nonzero characteristic")
                X = Rt
            else:
                X = solve_d(R, check=check)
            if X:
                level[(s, v)] = X
        h = DEndElement(N, n, k + 1, {**h.families, **level})
    if check and delta(h) != g:
        raise NotSolvableError("internal error: delta(h) != g")
    return h


# ---------------------------------------------------------------------------
# ladder maps


def B0(f: DEndElement) -> Ldo:
    if f.degree != 0:
        raise ValueError("B0 needs a degree-0 element")
    full = tuple(range(1, f.dim + 1))
    return f.component(0, (full,) * f.arity).component(full).to_mode(False)


def B1(h: DEndElement) -> Ldo:
    if h.degree != 1:
        raise ValueError("B1 needs a degree-1 element")
    full = tuple(range(1, h.dim + 1))
    return d_op(h.component(0, (full,) * h.arity)).component(full).to_mode(False)


def a1(A: Ldo) -> Ldo:
    """Inclusion of the image of B1 into operators on top forms."""
    return A


def Bm1(g: DEndElement) -> dict:
    """``Bm1(g)[(i, j)] = -(-1)^(i-1) chi(g_1)`` at the slot-``j`` index ``full - i``."""
    if g.degree != -1:
        raise ValueError("Bm1 needs a degree -1 element")
    N = g.dim
    full = tuple(range(1, N + 1))
    out = {}
    for j in range(1, g.arity + 1):
        for i in range(1, N + 1):
            v = [full] * g.arity
            v[j - 1] = full[: i - 1] + full[i:]
            comp = g.component(1, tuple(v)).component(full)
            val = characteristic(comp).to_mode(False)
            out[(i, j)] = val if (i - 1) % 2 else -val
    return out


def ladder_maps(f: DEndElement) -> dict:
    """The ladder map defined on ``f``'s degree, keyed by its name."""
    if f.degree == 0:
        return {"B0": B0(f)}
    if f.degree == 1:
        return {"B1": B1(f)}
    if f.degree == -1:
        return {"Bm1": Bm1(f)}
    raise ValueError("ladder maps exist in degrees -1, 0, 1")


# ---------------------------------------------------------------------------
# pointwise evaluation


def apply_dend(f: DEndElement, forms: Sequence[HorizontalForm]) -> HorizontalForm:
    """Evaluate ``f`` on a tuple of horizontal forms."""
    if len(forms) != f.arity:
        raise ValueError(f"expected {f.arity} forms")
    N = f.dim
    s = sum(N - w.degree for w in forms)
    out_degree = N - s - f.degree
    if not 0 <= out_degree <= N:
        return None
    out = HorizontalForm(N, out_degree)
    for choice in iproduct(*[sorted(w.components.items()) for w in forms]):
        v = tuple(eps for eps, _ in choice)
        F = f.families.get((s, v))
        if F is not None:
            out = out + apply_oform(F, [g for _, g in choice])
    return out


def dH_tensor(forms: Sequence[HorizontalForm]) -> list:
    """``d_H^{(x)n}`` as a list of ``(sign, forms)`` summands."""
    out = []
    prefix = 0
    for j, w in enumerate(forms):
        if w.degree < w.dim:
            sign = -1 if prefix % 2 else 1
            out.append((sign, list(forms[:j]) + [dH(w)] + list(forms[j + 1:])))
        prefix += w.dim - w.degree
    return out


def chain_map_residual(f: DEndElement, forms: Sequence[HorizontalForm]):
    """``d_H f(w) - (-1)^k f(d_H^{(x)n} w)`` evaluated pointwise."""
    k = f.degree
    lhs = apply_dend(f, forms)
    rhs = None
    for sign, args in dH_tensor(forms):
        val = apply_dend(f, args)
        if val is None:
            continue
        val = val if sign > 0 else -val
        rhs = val if rhs is None else rhs + val
    left = dH(lhs) if lhs is not None and lhs.degree < lhs.dim else None
    if rhs is not None and k % 2 == 0:
        rhs = -rhs
    parts = [p for p in (left, rhs) if p is not None]
    if not parts:
        return None
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total
