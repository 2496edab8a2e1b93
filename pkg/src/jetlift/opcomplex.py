"""Horizontal forms with operator coefficients and their constructive solvers.

In polarized form a term ``q zeta^I R dx^eps`` has
bidegree ``(p, q) = (k - |I|, |I|)``; the differential splits into ``d1``
(total derivative of the coefficient) and ``d2`` (one more zeta letter).
"""

from __future__ import annotations

from fractions import Fraction

from .horiforms import HorizontalForm, insert_index, insert_sign
from .jetalgebra import DimensionError, LocalFunction, lower_index, raise_index
from .ldocalc import ArityError, Ldo, _min_prec, apply, characteristic


class NotClosedError(ValueError):
    pass


class NotSolvableError(ValueError):
    pass


class OperatorForm:
    """``sum_eps A_eps dx^eps`` with arity-``arity`` operator coefficients.

    Components may be stored in either representation; the solvers switch to
    the polarized one.  Degree -1 is allowed for the (always zero) form below
    the bottom degree.
    """

    __slots__ = ("dim", "arity", "degree", "components")

    def __init__(self, dim: int, arity: int, degree: int, components: dict | None = None):
        if not -1 <= degree <= dim:
            raise DimensionError(f"form degree {degree} out of range")
        self.dim = dim
        self.arity = arity
        self.degree = degree
        self.components = {}
        for eps, A in (components or {}).items():
            eps = tuple(eps)
            if len(eps) != degree or list(eps) != sorted(set(eps)):
                raise DimensionError(f"bad basis element {eps} for degree {degree}")
            if A.dim != dim:
                raise DimensionError("component dimension mismatch")
            if A.arity != arity:
                raise ArityError("component arity mismatch")
            if A:
                self.components[eps] = A

    __hash__ = None

    @classmethod
    def zero(cls, dim, arity, degree):
        return cls(dim, arity, degree)

    @classmethod
    def top(cls, A: Ldo) -> OperatorForm:
        return cls(A.dim, A.arity, A.dim, {tuple(range(1, A.dim + 1)): A})

    @classmethod
    def scalar(cls, A: Ldo) -> OperatorForm:
        return cls(A.dim, A.arity, 0, {(): A})

    def component(self, eps) -> Ldo:
        eps = tuple(eps)
        if eps in self.components:
            return self.components[eps]
        return Ldo.zero(self.dim, self.arity, polarized=True, prec=self.prec)

    @property
    def prec(self):
        return _min_prec(*(A.prec for A in self.components.values()))

    def _like(self, comps, degree=None) -> OperatorForm:
        return OperatorForm(self.dim, self.arity, self.degree if degree is None else degree, comps)

    def _check(self, other):
        if (other.dim, other.arity, other.degree) != (self.dim, self.arity, self.degree):
            raise DimensionError("operator forms of different shape")

    def __add__(self, other):
        self._check(other)
        comps = dict(self.components)
        for eps, A in other.components.items():
            comps[eps] = comps[eps] + A if eps in comps else A
        # a component missing on one side still limits the precision
        p = _min_prec(self.prec, other.prec)
        return self._like({e: A.truncate(p) for e, A in comps.items()})

    def __neg__(self):
        return self._like({e: -A for e, A in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> OperatorForm:
        return self._like({e: A.scale(c) for e, A in self.components.items()})

    def map(self, fn) -> OperatorForm:
        return self._like({e: fn(A) for e, A in self.components.items()})

    def truncate(self, prec) -> OperatorForm:
        return self.map(lambda A: A.truncate(prec))

    def __eq__(self, other):
        if not isinstance(other, OperatorForm):
            return NotImplemented
        if (other.dim, other.arity, other.degree) != (self.dim, self.arity, self.degree):
            return False
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def polarized(self) -> OperatorForm:
        return self.map(lambda A: A.to_mode(True))

    def unpolarized(self) -> OperatorForm:
        return self.map(lambda A: A.to_mode(False))

    def zeta_degree(self) -> int:
        return max((A.to_mode(True).zeta_degree() for A in self.components.values()), default=-1)

    def block(self, q: int) -> OperatorForm:
        """Terms with exactly ``q`` zeta letters."""
        self = self.polarized()
        comps = {}
        for eps, A in self.components.items():
            comps[eps] = A._like({k: c for k, c in A.terms.items() if sum(k[0][0]) == q})
        return self._like(comps)

    def __str__(self):
        from .syntax import format_oform

        return format_oform(self)

    def __repr__(self):
        return f"<OperatorForm N={self.dim} n={self.arity} k={self.degree}: {self}>"


def _wedge_front(comps: dict, i: int, eps: tuple, A: Ldo) -> None:
    """Accumulate ``dx^i ^ (A dx^eps)`` into ``comps``."""
    if i in eps:
        return
    if insert_sign(i, eps) < 0:
        A = -A
    key = insert_index(i, eps)
    comps[key] = comps[key] + A if key in comps else A


def d1(F: OperatorForm) -> OperatorForm:
    F = F.polarized()
    comps: dict = {}
    for eps, A in F.components.items():
        for i in range(1, F.dim + 1):
            _wedge_front(comps, i, eps, A.map_coefficients(lambda c, i=i: c.total_derivative(i)))
    return F._like(comps, F.degree + 1) if F.degree < F.dim else OperatorForm(F.dim, F.arity, F.dim)


def d2(F: OperatorForm) -> OperatorForm:
    F = F.polarized()
    comps: dict = {}
    for eps, A in F.components.items():
        for i in range(1, F.dim + 1):
            raised = A._like({((raise_index(xi[0], i),) + xi[1:], eta): c
                              for (xi, eta), c in A.terms.items()})
            _wedge_front(comps, i, eps, raised)
    return F._like(comps, F.degree + 1) if F.degree < F.dim else OperatorForm(F.dim, F.arity, F.dim)


def d_op(F: OperatorForm) -> OperatorForm:
    """``d(A dx^eps) = sum_i (D_i o A) dx^i ^ dx^eps``."""
    if F.degree >= F.dim:
        return OperatorForm(F.dim, F.arity, F.dim)
    comps: dict = {}
    for eps, A in F.components.items():
        for i in range(1, F.dim + 1):
            if i not in eps:
                _wedge_front(comps, i, eps, A.left_total(i))
    return F._like(comps, F.degree + 1)


def koszul_homotopy(F: OperatorForm) -> OperatorForm:
    """``h(f dx^eps) = 1/(N-p) sum_{i in eps} df/dzeta^i iota_i dx^eps`` term by term."""
    if F.degree <= 0:
        return OperatorForm(F.dim, F.arity, max(F.degree - 1, -1))
    F = F.polarized()
    N, k = F.dim, F.degree
    comps: dict = {}
    for eps, A in F.components.items():
        for pos, i in enumerate(eps):
            key = eps[:pos] + eps[pos + 1:]
            terms: dict = {}
            for (xi, eta), c in A.terms.items():
                I = xi[0]
                if not I[i - 1]:
                    continue
                p = k - sum(I)
                if p >= N:
                    raise NotSolvableError("Koszul homotopy undefined at p = N")
                mult = Fraction(I[i - 1] * (-1 if pos % 2 else 1), N - p)
                nk = ((lower_index(I, i),) + xi[1:], eta)
                val = c.scale(mult)
                terms[nk] = terms[nk] + val if nk in terms else val
            piece = A._like(terms)
            comps[key] = comps[key] + piece if key in comps else piece
    return F._like(comps, k - 1)


def koszul_solve(z: OperatorForm) -> OperatorForm:
    """Solve ``d2(alpha) = z`` for a d2-closed ``z`` with all bidegrees p < N."""
    for A in z.components.values():
        for (xi, _), _c in A.terms.items():
            if z.degree - sum(xi[0]) >= z.dim:
                raise NotSolvableError("Koszul complex is not exact at p = N")
    z = z.polarized()
    if d2(z):
        raise NotClosedError("input is not d2-closed")
    alpha = koszul_homotopy(z)
    if d2(alpha) != z:
        raise NotSolvableError("no preimage under d2 (zeta-free part is nonzero)")
    return alpha


def reduce_top(A: OperatorForm | Ldo):
    """Split a top-degree form as ``d_op(At) + chi`` with ``chi`` free of zeta.

    Returns ``(At, chi)``; ``chi`` is the characteristic placed in top degree.
    """
    if isinstance(A, Ldo):
        A = OperatorForm.top(A)
    if A.degree != A.dim:
        raise DimensionError("reduce_top needs a form of top degree")
    A = A.polarized()
    N = A.dim
    full = tuple(range(1, N + 1))
    work = dict(A.component(full).terms)
    prec = A.prec
    tilde: dict = {}
    # stripping a zeta only creates terms of lower zeta-degree, so one
    # descending pass over the degrees visits every term once
    top = max((sum(k[0][0]) for k in work), default=0)
    for degree in range(top, 0, -1):
        for key in sorted((k for k in work if sum(k[0][0]) == degree), reverse=True):
            (xi, eta), q = key, work.pop(key)
            I = xi[0]
            i = next(a for a, e in enumerate(I, start=1) if e)
            lowered = ((lower_index(I, i),) + xi[1:], eta)
            sign = -1 if (i - 1) % 2 else 1
            eps = full[: i - 1] + full[i:]
            bucket = tilde.setdefault(eps, {})
            val = q.scale(sign)
            bucket[lowered] = bucket[lowered] + val if lowered in bucket else val
            dq = q.total_derivative(i)
            if dq:
                work[lowered] = work[lowered] - dq if lowered in work else -dq
                if not work[lowered]:
                    del work[lowered]
    comps = {eps: Ldo(N, A.arity, t, polarized=True, prec=prec) for eps, t in tilde.items()}
    At = OperatorForm(N, A.arity, N - 1, comps)
    chi = OperatorForm(N, A.arity, N, {full: Ldo(N, A.arity, work, polarized=True, prec=prec)})
    return At, chi


def solve_d(Y: OperatorForm, check: bool = True) -> OperatorForm:
    """Return ``X`` with ``d_op(X) = Y`` for a closed ``Y`` of degree < N."""
    if Y.degree >= Y.dim:
        raise DimensionError("top degree: use reduce_top (solvable iff chi = 0)")
    if check and d_op(Y):
        raise NotClosedError("input is not d-closed")
    Y = Y.polarized()
    X = OperatorForm(Y.dim, Y.arity, Y.degree - 1)
    while Y:
        u = Y.zeta_degree()
        if u < 1:
            raise NotSolvableError("closed residual without zeta letters; the complex is acyclic here")
        alpha = koszul_homotopy(Y.block(u))
        Y = Y - d_op(alpha)
        X = X + alpha
    return X


def apply_oform(F: OperatorForm, args) -> HorizontalForm:
    """Evaluate every component on ``args``; the result is a horizontal form."""
    if F.degree < 0:
        raise DimensionError("no forms in degree -1")
    return HorizontalForm(F.dim, F.degree, {e: apply(A, args) for e, A in F.components.items()})


def characteristic_form(F: OperatorForm) -> OperatorForm:
    return F.map(characteristic)


def top_ldo(F: OperatorForm) -> Ldo:
    return F.component(tuple(range(1, F.dim + 1)))


def constant_form(dim: int, arity: int, degree: int, eps, c) -> OperatorForm:
    A = Ldo.multiplication(LocalFunction.const(dim, c), arity)
    return OperatorForm(dim, arity, degree, {tuple(eps): A})
