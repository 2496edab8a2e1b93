"""Strongly homotopy Lie brackets whose components are local operators.

Grading is the regraded one: a horizontal form of degree ``N - s`` has
degree ``s``, ``l_1 = d_H`` has degree -1 and ``l_k`` has degree ``k - 2``.
For a permutation ``sigma`` acting on homogeneous ``x_1..x_n``,
``chi(sigma; x) = sgn(sigma) * e(sigma; x)`` where ``e`` is the Koszul sign
of reordering ``x_1..x_n`` into ``x_sigma(1)..x_sigma(n)``.  The relation
checked for every ``n`` is

    sum_{i+j=n+1} sum_{sigma in unsh(i, n-i)} chi(sigma) (-1)^(i(j-1))
        l_j(l_i(x_sigma(1), ..., x_sigma(i)), x_sigma(i+1), ..., x_sigma(n)) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Sequence

from .horiforms import HorizontalForm, dH
from .jetalgebra import LocalFunction
from .ldocalc import Ldo, characteristic, compose, euler_operator, sym_action
from .lifting import (
    DEndElement,
    a0,
    apply_dend,
    delta,
    lift,
    solve_delta,
)
from .opcomplex import OperatorForm, d_op, reduce_top, top_ldo
from .randgen import FunctionConfig, make_rng, random_hform


class ConditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# permutations and signs


def unshuffles(i: int, n: int) -> list:
    """``(i, n-i)``-unshuffles as tuples of images, in lexicographic order."""
    out = []
    for head in combinations(range(1, n + 1), i):
        tail = tuple(m for m in range(1, n + 1) if m not in head)
        out.append(head + tail)
    return out


def inverse(sigma: Sequence[int]) -> tuple:
    inv = [0] * len(sigma)
    for pos, img in enumerate(sigma, start=1):
        inv[img - 1] = pos
    return tuple(inv)


def koszul_chi(sigma: Sequence[int], degrees: Sequence[int]) -> int:
    """``sgn(sigma) * e(sigma)`` for reordering ``x_1..x_n`` to ``x_sigma(1)..x_sigma(n)``."""
    sign = 1
    n = len(sigma)
    for p in range(n):
        for q in range(p + 1, n):
            a, b = sigma[p], sigma[q]
            if a > b:
                sign = -sign
                if degrees[a - 1] * degrees[b - 1] % 2:
                    sign = -sign
    return sign


# ---------------------------------------------------------------------------
# operadic operations on DEnd elements


def permute(f: DEndElement, sigma: Sequence[int]) -> DEndElement:
    """``G(x_1..x_n) = chi(sigma; x) f(x_sigma(1), ..., x_sigma(n))``."""
    sigma = tuple(sigma)
    N, n = f.dim, f.arity
    inv = inverse(sigma)
    fams = {}
    for (s, v), F in f.families.items():
        # f's component at (eps_sigma(1)..eps_sigma(n)) becomes G's at eps
        new_v = tuple(v[inv[m] - 1] for m in range(n))
        degrees = [N - len(e) for e in new_v]
        sign = koszul_chi(sigma, degrees)
        G = F.map(lambda A: sym_action(inv, A))
        fams[(s, new_v)] = G if sign > 0 else -G
    return DEndElement(N, n, f.degree, fams)


def skew_project(f: DEndElement) -> DEndElement:
    perms = list(permutations(range(1, f.arity + 1)))
    # permuting slots is a relabelling only in the unpolarized representation
    f = f.map(lambda F: F.unpolarized())
    acc = DEndElement(f.dim, f.arity, f.degree)
    for sigma in perms:
        acc = acc + permute(f, sigma)
    return acc.scale(Fraction(1, len(perms)))


def is_skew(f: DEndElement) -> bool:
    return all(permute(f, s) == f for s in permutations(range(1, f.arity + 1)))


def compose_first(outer: DEndElement, inner: DEndElement) -> DEndElement:
    """``(outer o_1 inner)(x_1..x_n) = outer(inner(x_1..x_i), x_{i+1}..x_n)``."""
    N = outer.dim
    i, j = inner.arity, outer.arity
    n = i + j - 1
    k = outer.degree + inner.degree
    ident = Ldo.identity(N)
    fams: dict = {}
    for (s_in, v_in), F_in in inner.families.items():
        for (s_out, v_out), F_out in outer.families.items():
            for eps_mid, A in F_in.components.items():
                if v_out[0] != eps_mid:
                    continue
                rest = v_out[1:]
                s = s_in + sum(N - len(e) for e in rest)
                key = (s, v_in + rest)
                inner_op = A.to_mode(False)
                comps = {}
                for eta, B in F_out.components.items():
                    comps[eta] = compose(B.to_mode(False), [inner_op] + [ident] * (j - 1))
                piece = OperatorForm(N, n, F_out.degree, comps)
                fams[key] = fams[key] + piece if key in fams else piece
    return DEndElement(N, n, k, fams)


# ---------------------------------------------------------------------------
# the Poisson-type conditions on a bilinear top-degree bracket


def _as_top_ldo(lt2) -> Ldo:
    if isinstance(lt2, OperatorForm):
        if lt2.degree != lt2.dim:
            raise ValueError("bracket must be a top-degree operator form")
        lt2 = top_ldo(lt2)
    if lt2.arity != 2:
        raise ValueError("bracket must be bilinear")
    return lt2.to_mode(False)


def jacobi_sum(lt2) -> Ldo:
    """``l(l(1,2),3) - l(l(1,3),2) + l(l(2,3),1)`` as a trilinear operator."""
    L = _as_top_ldo(lt2)
    C = compose(L, [L, Ldo.identity(L.dim)])
    return C - sym_action((1, 3, 2), C) + sym_action((3, 1, 2), C)


@dataclass
class PoissonReport:
    i: bool
    ii: bool
    iii: bool
    details: dict = field(default_factory=dict)

    @property
    def all_true(self) -> bool:
        return self.i and self.ii and self.iii


def check_poisson_conditions(lt2) -> PoissonReport:
    L = _as_top_ldo(lt2)
    obstruction = {k: v for k, v in a0(L).items() if v}
    sym = characteristic(L + sym_action((2, 1), L))
    jac = characteristic(jacobi_sum(L))
    return PoissonReport(
        i=not obstruction, ii=sym.is_zero(), iii=jac.is_zero(),
        details={"a0": obstruction, "chi_symmetric": sym, "chi_jacobi": jac})


def skew_symmetrize(lt2) -> OperatorForm:
    """Subtract half an exact term so that the bracket becomes skew."""
    L = _as_top_ldo(lt2)
    S = OperatorForm.top(L + sym_action((2, 1), L))
    m, chi = reduce_top(S)
    if chi:
        raise ConditionError("symmetric part is not exact: condition (ii) fails")
    m = m.map(lambda A: (A + sym_action((2, 1), A)).scale(Fraction(1, 2)))
    return OperatorForm.top(L) - d_op(m).scale(Fraction(1, 2))


# ---------------------------------------------------------------------------
# the tower


@dataclass
class ShLieTower:
    dim: int
    brackets: dict  # arity -> DEndElement of degree arity - 2
    lt2: Ldo | None = None

    @property
    def kmax(self) -> int:
        return max(self.brackets, default=1)

    def bracket(self, k: int) -> DEndElement:
        return self.brackets[k]


def defect(brackets: dict, n: int) -> DEndElement:
    """Terms of the arity-``n`` relation with both ``i, j >= 2``."""
    N = brackets[2].dim
    acc = None
    for i in range(2, n):
        j = n + 1 - i
        if j < 2:
            continue
        comp = compose_first(brackets[j], brackets[i])
        sign_ij = -1 if (i * (j - 1)) % 2 else 1
        for sigma in unshuffles(i, n):
            term = permute(comp, sigma)
            if sign_ij < 0:
                term = -term
            acc = term if acc is None else acc + term
    if acc is None:
        acc = DEndElement(N, n, n - 3)
    return acc


def jacobiator(l2: DEndElement) -> DEndElement:
    """The arity-3 defect of ``l2``; ``l3`` must satisfy ``delta(l3) = -jacobiator``."""
    if delta(l2):
        raise ConditionError("l2 is not a delta-cycle")
    return defect({2: l2}, 3)


def build_tower(lt2, kmax: int = 3, check: bool = False) -> ShLieTower:
    L = _as_top_ldo(lt2)
    report = check_poisson_conditions(L)
    if not report.all_true:
        failed = [c for c in ("i", "ii", "iii") if not getattr(report, c)]
        raise ConditionError(f"conditions {failed} fail")
    skew = skew_symmetrize(L)
    l2 = skew_project(lift(top_ldo(skew)))
    brackets = {2: l2}
    for n in range(3, kmax + 1):
        D = defect(brackets, n)
        h = solve_delta(-D, allow_degree_zero=(D.degree == 0), check=check)
        brackets[n] = skew_project(h)
    return ShLieTower(L.dim, brackets, L)


def kdv_bracket(order: int) -> Ldo:
    """``E(a) * d/dx E(b)`` with both Euler operators truncated at ``order``."""
    E = euler_operator(1, order)
    prod = Ldo.multiplication(LocalFunction.one(1), 2)
    return compose(prod, [E, E.left_total(1)])


# ---------------------------------------------------------------------------
# pointwise verification


def _apply_bracket(tower: ShLieTower, k: int, forms):
    if k == 1:
        w = forms[0]
        return dH(w) if w.degree < w.dim else None
    if k not in tower.brackets:
        return None
    return apply_dend(tower.brackets[k], forms)


def relation_value(tower: ShLieTower, forms: Sequence[HorizontalForm]):
    """Left-hand side of the arity-``n`` relation on ``forms`` (None if empty)."""
    n = len(forms)
    N = tower.dim
    degrees = [N - w.degree for w in forms]
    total = None
    for i in range(1, n + 1):
        j = n + 1 - i
        for sigma in unshuffles(i, n):
            inner = _apply_bracket(tower, i, [forms[m - 1] for m in sigma[:i]])
            if inner is None:
                continue
            outer = _apply_bracket(tower, j, [inner] + [forms[m - 1] for m in sigma[i:]])
            if outer is None:
                continue
            sign = koszul_chi(sigma, degrees) * (-1 if (i * (j - 1)) % 2 else 1)
            val = outer if sign > 0 else -outer
            total = val if total is None else total + val
    return total


@dataclass
class VerificationReport:
    trials: int
    checked: dict = field(default_factory=dict)  # n -> number of nonempty evaluations
    failures: dict = field(default_factory=dict)  # n -> list of input tuples

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())


def verify_shlie(tower: ShLieTower, nmax: int = 3, trials: int = 25, seed: int | None = None,
                 cfg: FunctionConfig | None = None) -> VerificationReport:
    """Evaluate the relations for ``n <= nmax`` on random form tuples.

    Each pattern of form degrees gets ``trials`` tuples of its own, because
    the higher brackets live on few patterns (at N = 1, l3 only sees three
    top forms) and uniform sampling would rarely reach them.
    """
    rng = make_rng(seed)
    report = VerificationReport(trials)
    N = tower.dim
    for n in range(1, nmax + 1):
        report.checked[n] = 0
        report.failures[n] = []
        for pattern in product(range(N + 1), repeat=n):
            for _ in range(trials):
                forms = [random_hform(rng, N, p, cfg) for p in pattern]
                val = relation_value(tower, forms)
                if val is None:
                    break  # the relation has no terms on this pattern
                report.checked[n] += 1
                if val:
                    report.failures[n].append([str(w) for w in forms])
    return report
