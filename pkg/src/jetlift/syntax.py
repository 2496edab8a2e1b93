"""Text syntax for local functions, operators and forms.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" nat)?
    atom   := rational | "x[" nat "]" | "u[" mindex "]" | "D[" nat "," nat "]"
            | "V[" nat "," mindex "]" | "Z[" nat "]" | "dx[" indexlist "]"
            | "(" expr ")"
    mindex := "(" nat ("," nat)* ")"

A product is operator composition, so letters act right to left.  ``Z[i]``
abbreviates ``D[1,i] + ... + D[n,i]``.  Values are normal-ordered while
parsing, so any order of letters is accepted.  ``dx`` factors are central and
multiply by the wedge product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .jetalgebra import DimensionError, LocalFunction

MAX_EXPONENT = 64
MAX_INDEX = 64


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# printing


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_index(J) -> str:
    return "(" + ",".join(str(j) for j in J) + ")"


def _pow(s: str, e: int) -> str:
    return s if e == 1 else f"{s}^{e}"


def _monomial_factors(xe, ue) -> list:
    out = [_pow(f"x[{i}]", e) for i, e in enumerate(xe, start=1) if e]
    out += [_pow(f"u[{_fmt_index(J)}]", m) for J, m in ue]
    return out


def _join_term(c: Fraction, factors: list) -> str:
    if not factors:
        return _fmt_rational(c)
    body = "*".join(factors)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{_fmt_rational(c)}*{body}"


def _join_sum(parts: list) -> str:
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def format_local_function(f: LocalFunction) -> str:
    return _join_sum([_join_term(c, _monomial_factors(*k)) for k, c in f.sorted_terms()])


def _letter_factors(A, xi, eta) -> list:
    out = []
    for j, I in enumerate(xi, start=1):
        for i, e in enumerate(I, start=1):
            if e:
                out.append(_pow(f"Z[{i}]" if (A.polarized and j == 1) else f"D[{j},{i}]", e))
    for j, mono in enumerate(eta, start=1):
        for J, m in mono:
            out.append(_pow(f"V[{j},{_fmt_index(J)}]", m))
    return out


def _ldo_parts(A, suffix=()) -> list:
    parts = []
    for (xi, eta), c in A.sorted_terms():
        letters = _letter_factors(A, xi, eta) + list(suffix)
        for mono, q in c.sorted_terms():
            parts.append(_join_term(q, _monomial_factors(*mono) + letters))
    return parts


def format_ldo(A) -> str:
    return _join_sum(_ldo_parts(A))


def _dx(eps) -> str:
    return "dx[" + ",".join(str(e) for e in eps) + "]"


def format_hform(w) -> str:
    parts = []
    for eps in sorted(w.components):
        suffix = [_dx(eps)] if eps else []
        for mono, q in w.components[eps].sorted_terms():
            parts.append(_join_term(q, _monomial_factors(*mono) + suffix))
    return _join_sum(parts)


def format_oform(F) -> str:
    parts = []
    for eps in sorted(F.components):
        parts += _ldo_parts(F.components[eps], [_dx(eps)] if eps else [])
    return _join_sum(parts)


def format_dend(f) -> str:
    """One line per component: ``s=<s> [eps_1|...|eps_n]: <operator form>``."""
    if not f.families:
        return "0"
    lines = []
    for (s, v), F in sorted(f.families.items()):
        slots = "|".join(",".join(map(str, e)) for e in v)
        lines.append(f"s={s} [{slots}]: {format_oform(F)}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# lexing


@dataclass
class Token:
    kind: str  # "nat", "name", or the punctuation character; "eof" at the end
    text: str
    line: int
    col: int


_PUNCT = set("+-*^/()[],")


def tokenize(text: str) -> list:
    tokens = []
    line, col, k = 1, 1, 0
    while k < len(text):
        ch = text[k]
        if ch == "\n":
            line, col, k = line + 1, 1, k + 1
            continue
        if ch in " \t\r":
            col, k = col + 1, k + 1
            continue
        start = k
        if ch.isdigit():
            while k < len(text) and text[k].isdigit():
                k += 1
            tokens.append(Token("nat", text[start:k], line, col))
        elif ch.isalpha():
            while k < len(text) and text[k].isalpha():
                k += 1
            tokens.append(Token("name", text[start:k], line, col))
        elif ch in _PUNCT:
            k += 1
            tokens.append(Token(ch, ch, line, col))
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        col += k - start
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# values during parsing: dict wedge-key -> unpolarized Ldo of the context arity


class _Parser:
    def __init__(self, text: str, dim: int, arity: int):
        from .ldocalc import Ldo

        self.Ldo = Ldo
        self.toks = tokenize(text)
        self.pos = 0
        self.dim = dim
        self.arity = arity
        self.slot_cache: dict = {}

    # token helpers
    def peek(self) -> Token:
        return self.toks[self.pos]

    def take(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (what is not None and tok.text != what):
            expected = what or kind
            got = tok.text or "end of input"
            raise ParseError(f"expected {expected!r}, got {got!r}", tok.line, tok.col)
        self.pos += 1
        return tok

    def nat(self, limit: int | None = MAX_INDEX, what: str = "index") -> int:
        tok = self.take("nat")
        v = int(tok.text)
        if limit is not None and v > limit:
            raise ParseError(f"{what} {v} exceeds limit {limit}", tok.line, tok.col)
        return v

    # value helpers
    def const(self, c) -> dict:
        f = LocalFunction.const(self.dim, c)
        return {(): self.Ldo.multiplication(f, self.arity)}

    def add(self, a: dict, b: dict, sign: int = 1) -> dict:
        out = dict(a)
        for eps, B in b.items():
            B = B if sign == 1 else -B
            out[eps] = out[eps] + B if eps in out else B
        return {e: v for e, v in out.items() if v}

    def mul(self, a: dict, b: dict, tok: Token) -> dict:
        out: dict = {}
        for ea, A in a.items():
            for eb, B in b.items():
                if set(ea) & set(eb):
                    continue
                sign = _wedge_sign(ea, eb)
                prod = self.ldo_product(A, B, tok)
                if sign < 0:
                    prod = -prod
                key = tuple(sorted(ea + eb))
                out[key] = out[key] + prod if key in out else prod
        return {e: v for e, v in out.items() if v}

    def ldo_product(self, A, B, tok: Token):
        from .ldocalc import compose

        if self.arity == 1:
            return compose(A, [B])
        empty = self.Ldo.empty_key(self.dim, self.arity)
        if set(A.terms) <= {empty}:
            return B.scale(A.terms[empty]) if A.terms else A
        if any(not c.is_constant() for c in B.terms.values()):
            raise ParseError("non-constant coefficient to the right of a letter "
                             "is ambiguous for arity >= 2", tok.line, tok.col)
        acc = self.Ldo.zero(self.dim, self.arity)
        for (xa, ea), ca in A.terms.items():
            for (xb, eb), cb in B.terms.items():
                piece = {((), ()): ca.scale(cb.constant_value())}
                for j in range(self.arity):
                    slot = self.slot_product((xa[j], ea[j]), (xb[j], eb[j]))
                    piece = {
                        (px + sx, pe + se): pc * sc
                        for (px, pe), pc in piece.items()
                        for (sx, se), sc in slot.terms.items()
                    }
                acc = acc + self.Ldo(self.dim, self.arity, _collect(piece))
        return acc

    def slot_product(self, a, b):
        from .ldocalc import compose

        key = (a, b)
        if key not in self.slot_cache:
            one = LocalFunction.one(self.dim)
            A = self.Ldo(self.dim, 1, {((a[0],), (a[1],)): one})
            B = self.Ldo(self.dim, 1, {((b[0],), (b[1],)): one})
            self.slot_cache[key] = compose(A, [B])
        return self.slot_cache[key]

    # grammar
    def parse(self) -> dict:
        val = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
        return val

    def expr(self) -> dict:
        val = self.term()
        while self.peek().kind in ("+", "-"):
            sign = 1 if self.take(self.peek().kind).kind == "+" else -1
            val = self.add(val, self.term(), sign)
        return val

    def term(self) -> dict:
        tok = self.peek()
        if tok.kind == "-":
            # a leading minus binds to the first factor
            self.pos += 1
            val = self.add({}, self.factor(), -1)
        else:
            val = self.factor()
        while self.peek().kind == "*":
            star = self.take("*")
            val = self.mul(val, self.factor(), star)
        return val

    def factor(self) -> dict:
        start = self.peek()
        val = self.atom()
        if self.peek().kind == "^":
            self.take("^")
            e = self.nat(MAX_EXPONENT, "exponent")
            out = self.const(1)
            for _ in range(e):
                out = self.mul(out, val, start)
            val = out
        return val

    def atom(self) -> dict:
        tok = self.peek()
        if tok.kind == "nat":
            num = self.nat(None)
            if self.peek().kind == "/":
                self.take("/")
                dtok = self.peek()
                den = self.nat(None)
                if den == 0:
                    raise ParseError("zero denominator", dtok.line, dtok.col)
                return self.const(Fraction(num, den))
            return self.const(num)
        if tok.kind == "(":
            self.take("(")
            val = self.expr()
            self.take(")")
            return val
        if tok.kind != "name":
            got = tok.text or "end of input"
            raise ParseError(f"expected an atom, got {got!r}", tok.line, tok.col)
        name = tok.text
        self.pos += 1
        self.take("[")
        if name == "x":
            i = self.axis()
            self.take("]")
            f = LocalFunction.x(self.dim, i)
            return {(): self.Ldo.multiplication(f, self.arity)}
        if name == "u":
            J = self.mindex()
            self.take("]")
            f = LocalFunction.u(self.dim, J)
            return {(): self.Ldo.multiplication(f, self.arity)}
        if name == "D":
            j = self.slot()
            self.take(",")
            i = self.axis()
            self.take("]")
            return {(): self.Ldo.total(self.dim, self.arity, j, i)}
        if name == "V":
            j = self.slot()
            self.take(",")
            J = self.mindex()
            self.take("]")
            return {(): self.Ldo.vertical(self.dim, self.arity, j, J)}
        if name == "Z":
            i = self.axis()
            self.take("]")
            acc = self.Ldo.zero(self.dim, self.arity)
            for j in range(1, self.arity + 1):
                acc = acc + self.Ldo.total(self.dim, self.arity, j, i)
            return {(): acc}
        if name == "dx":
            eps = [self.axis()]
            while self.peek().kind == ",":
                self.take(",")
                eps.append(self.axis())
            self.take("]")
            if len(set(eps)) != len(eps):
                return {}
            key = tuple(sorted(eps))
            one = self.Ldo.multiplication(LocalFunction.one(self.dim), self.arity)
            return {key: one if _perm_sign(eps) > 0 else -one}
        raise ParseError(f"unknown atom {name!r}", tok.line, tok.col)

    def axis(self) -> int:
        tok = self.peek()
        i = self.nat()
        if not 1 <= i <= self.dim:
            raise ParseError(f"axis {i} out of range 1..{self.dim}", tok.line, tok.col)
        return i

    def slot(self) -> int:
        tok = self.peek()
        j = self.nat()
        if not 1 <= j <= self.arity:
            raise ParseError(f"slot {j} out of range 1..{self.arity}", tok.line, tok.col)
        return j

    def mindex(self) -> tuple:
        tok = self.take("(")
        J = [self.nat()]
        while self.peek().kind == ",":
            self.take(",")
            J.append(self.nat())
        self.take(")")
        if len(J) != self.dim:
            raise ParseError(f"multi-index needs {self.dim} entries, got {len(J)}", tok.line, tok.col)
        return tuple(J)


def _collect(items: dict) -> dict:
    return {k: v for k, v in items.items() if v}


def _perm_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


def _wedge_sign(ea, eb) -> int:
    return _perm_sign(tuple(ea) + tuple(eb))


def _parse_value(text: str, dim: int, arity: int) -> dict:
    if dim < 1 or arity < 1:
        raise ParseError("dimension and arity must be positive", 1, 1)
    try:
        return _Parser(text, dim, arity).parse()
    except ParseError:
        raise
    except (DimensionError, ValueError) as exc:
        raise ParseError(str(exc), 1, 1) from exc


def _coefficient_only(A, what: str) -> LocalFunction:
    from .ldocalc import Ldo

    empty = Ldo.empty_key(A.dim, A.arity)
    if set(A.terms) - {empty}:
        raise ParseError(f"{what} may not contain operator letters", 1, 1)
    return A.terms.get(empty, LocalFunction.zero(A.dim))


def _single_degree(val: dict, degree: int | None) -> int:
    # "0" carries no dx and so fits any degree
    degrees = {len(e) for e, A in val.items() if A}
    if len(degrees) > 1:
        raise ParseError("components of mixed form degree", 1, 1)
    if degrees:
        d = degrees.pop()
        if degree is not None and d != degree:
            raise ParseError(f"expected a form of degree {degree}, got {d}", 1, 1)
        return d
    return 0 if degree is None else degree


def parse_local_function(text: str, dim: int) -> LocalFunction:
    val = _parse_value(text, dim, 1)
    if set(val) - {()}:
        raise ParseError("a local function may not contain dx", 1, 1)
    if not val:
        return LocalFunction.zero(dim)
    return _coefficient_only(val[()], "a local function")


def parse_ldo(text: str, dim: int, arity: int = 1, polarized: bool = False):
    from .ldocalc import Ldo

    val = _parse_value(text, dim, arity)
    if set(val) - {()}:
        raise ParseError("an operator may not contain dx; parse it as a form", 1, 1)
    A = val.get((), Ldo.zero(dim, arity))
    return A.to_mode(polarized)


def parse_hform(text: str, dim: int, degree: int | None = None):
    from .horiforms import HorizontalForm

    val = _parse_value(text, dim, 1)
    k = _single_degree(val, degree)
    comps = {e: _coefficient_only(A, "a horizontal form") for e, A in val.items() if A}
    return HorizontalForm(dim, k, comps)


def parse_oform(text: str, dim: int, arity: int = 1, degree: int | None = None):
    from .opcomplex import OperatorForm

    val = _parse_value(text, dim, arity)
    k = _single_degree(val, degree)
    return OperatorForm(dim, arity, k, {e: A.polarize() for e, A in val.items() if A})


def parse(text: str, kind: str, dim: int, arity: int = 1, polarized: bool = False,
          degree: int | None = None):
    """Dispatch on ``kind`` in {"lf", "ldo", "hform", "oform"}."""
    if kind == "lf":
        return parse_local_function(text, dim)
    if kind == "ldo":
        return parse_ldo(text, dim, arity, polarized)
    if kind == "hform":
        return parse_hform(text, dim, degree)
    if kind == "oform":
        return parse_oform(text, dim, arity, degree)
    raise ValueError(f"unknown kind {kind!r}")
