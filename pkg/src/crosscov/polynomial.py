"""Noncommutative *-polynomials in the family symbols, their moments under a
state, the centred-and-scaled limit, and the text syntax used by the CLI.

Grammar (whitespace ignored)::

    poly   := ["+" | "-"] term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := number | "I" | SYM ["^*"]
    SYM    := ("C" | "E") digits
    number := digits ["." digits] ["/" digits]  |  "." digits

A coefficient may appear anywhere in a term and multiplies it; ``-`` may also
prefix a number (``1.0*C1 + -2*I``).  One polynomial uses either ``C`` or
``E`` symbols, not both.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .cumulants import (
    Letter,
    MomentFunctional,
    Scalar,
    StarWord,
    cumulants_from_moments,
    to_fraction,
)
from .errors import DivergentLimitError, DomainError, PolynomialParseError, SizeLimitError, current_limits

__all__ = [
    "Surd",
    "NCPolynomial",
    "poly_mul",
    "poly_adjoint",
    "is_symmetric",
    "poly_moment",
    "poly_cumulant",
    "centered_scaled_limit",
    "parse_polynomial",
]


def _squarefree_split(m: int) -> tuple[int, int]:
    """m = s^2 * f with f squarefree; returns (s, f)."""
    s, f, d = 1, 1, 2
    while d * d <= m:
        while m % (d * d) == 0:
            m //= d * d
            s *= d
        if m % d == 0:
            m //= d
            f *= d
        d += 1
    return s, f * m


class Surd:
    """Exact element of Q[sqrt(q) : q rational], stored as ``{f: c}`` meaning
    ``sum c * sqrt(f)`` over squarefree integers ``f``.

    >>> Surd.sqrt(Fraction(1, 2)) * Surd.sqrt(2)
    Fraction(1, 1)
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Fraction]):
        self.terms = {f: Fraction(c) for f, c in terms.items() if c}

    @classmethod
    def sqrt(cls, q: Scalar) -> Union["Surd", Fraction]:
        q = to_fraction(q)
        if q < 0:
            raise DomainError(f"square root of negative {q}")
        # sqrt(a/b) = sqrt(a*b)/b
        s, f = _squarefree_split(q.numerator * q.denominator)
        return cls({f: Fraction(s, q.denominator)}).simplify()

    def simplify(self) -> Union["Surd", Fraction]:
        if not self.terms:
            return Fraction(0)
        if set(self.terms) == {1}:
            return self.terms[1]
        return self

    @staticmethod
    def _lift(x) -> "Surd":
        if isinstance(x, Surd):
            return x
        return Surd({1: to_fraction(x)})

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for f, c in other.terms.items():
            out[f] = out.get(f, 0) + c
        return Surd(out).simplify()

    __radd__ = __add__

    def __neg__(self):
        return Surd({f: -c for f, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict[int, Fraction] = {}
        for f1, c1 in self.terms.items():
            for f2, c2 in other.terms.items():
                g = f1 * f2
                s, f = _squarefree_split(g)
                out[f] = out.get(f, 0) + c1 * c2 * s
        return Surd(out).simplify()

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out: Union[Surd, Fraction] = Fraction(1)
        for _ in range(k):
            out = out * self
        return out

    def __float__(self) -> float:
        return float(sum(float(c) * (f ** 0.5) for f, c in self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Surd)):
            return self._lift(other).terms == self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"Surd({self})"

    def __str__(self) -> str:
        parts = []
        for f in sorted(self.terms):
            c = self.terms[f]
            parts.append(str(c) if f == 1 else f"{c}*sqrt({f})")
        return " + ".join(parts) if parts else "0"


Coef = Union[Fraction, Surd]


def _coef(c) -> Coef:
    return c if isinstance(c, Surd) else to_fraction(c)


@dataclass(frozen=True, eq=False)
class NCPolynomial:
    """Finite linear combination of :class:`StarWord` s (empty word = identity).

    ``symbol`` names the matrices the letters stand for: ``"C"`` (raw
    cross-covariance) or ``"E"`` (centred and scaled).
    """

    terms: Mapping[StarWord, Coef]
    symbol: str = "C"

    def __post_init__(self):
        if self.symbol not in ("C", "E"):
            raise DomainError(f"symbol must be 'C' or 'E', got {self.symbol!r}")
        clean: dict[StarWord, Coef] = {}
        for w, c in self.terms.items():
            w = w if isinstance(w, StarWord) else StarWord(w)
            c = _coef(c)
            if c:
                clean[w] = clean.get(w, Fraction(0)) + c
                if not clean[w]:
                    del clean[w]
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0]))))

    @classmethod
    def identity(cls, symbol: str = "C", coef: Scalar = 1) -> "NCPolynomial":
        return cls({StarWord(): coef}, symbol)

    @classmethod
    def letter(cls, label: int, star: bool = False, symbol: str = "C") -> "NCPolynomial":
        return cls({StarWord([Letter(label, star)]): 1}, symbol)

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted({l.label for w in self.terms for l in w}))

    def is_zero(self) -> bool:
        return not self.terms

    def _check_symbol(self, other: "NCPolynomial") -> str:
        # identity-only polynomials adapt to either symbol
        if self.labels and other.labels and self.symbol != other.symbol:
            raise DomainError(f"cannot combine {self.symbol}- and {other.symbol}-polynomials")
        return self.symbol if self.labels else other.symbol

    def __add__(self, other):
        if not isinstance(other, NCPolynomial):
            other = NCPolynomial.identity(self.symbol, other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return NCPolynomial(out, self._check_symbol(other))

    __radd__ = __add__

    def scale(self, c) -> "NCPolynomial":
        c = _coef(c)
        return NCPolynomial({w: c * v for w, v in self.terms.items()}, self.symbol)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, NCPolynomial):
            other = NCPolynomial.identity(self.symbol, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NCPolynomial):
            return poly_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int) -> "NCPolynomial":
        if k < 0:
            raise DomainError("negative power")
        out = NCPolynomial.identity(self.symbol)
        for _ in range(k):
            out = poly_mul(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        same_symbol = self.symbol == other.symbol or not (self.labels or other.labels)
        return same_symbol and self.terms == other.terms

    def __hash__(self):
        return hash((self.symbol, tuple(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms.items():
            syms = [f"{self.symbol}{l.label}{'^*' if l.star else ''}" for l in w] or ["I"]
            parts.append(f"({c})*" + "*".join(syms))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"NCPolynomial({self})"


def poly_mul(a: NCPolynomial, b: NCPolynomial) -> NCPolynomial:
    symbol = a._check_symbol(b)
    out: dict[StarWord, Coef] = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            w = wa + wb
            out[w] = out.get(w, Fraction(0)) + ca * cb
    return NCPolynomial(out, symbol)


def poly_adjoint(a: NCPolynomial) -> NCPolynomial:
    # coefficients are real, so conjugation is the identity
    return NCPolynomial({w.adjoint(): c for w, c in a.terms.items()}, a.symbol)


def is_symmetric(a: NCPolynomial) -> bool:
    """Structural self-adjointness ``a == a*``."""
    return poly_adjoint(a) == a


def poly_moment(a: NCPolynomial, k: int, phi: MomentFunctional) -> Coef:
    """phi(a^k), expanding the power and summing word moments."""
    if k < 0:
        raise DomainError("negative power")
    length = a.degree * k
    cap = current_limits().word_max
    if length > cap:
        raise SizeLimitError(f"expanded word length {length} exceeds word_max={cap}")
    total: Coef = Fraction(0)
    for w, c in (a**k).terms.items():
        m = phi(w)
        if m:
            total = total + c * m
    return total


def poly_cumulant(a: NCPolynomial, k: int, phi: MomentFunctional) -> Coef:
    """Free cumulant kappa_k(a, ..., a) by Moebius inversion of phi(a^j)."""
    if k < 1:
        raise DomainError("cumulant order must be >= 1")
    moments = MomentFunctional(lambda w: poly_moment(a, len(w), phi), f"moments of {a}")
    return cumulants_from_moments(StarWord.power(1, [False] * k), moments)


def centered_scaled_limit(
    a: NCPolynomial,
    rhos: Mapping[int, Scalar],
    ratios: Mapping[int, Optional[Scalar]],
) -> NCPolynomial:
    """Limit of ``sqrt(n/p) * a(C)`` as ``p/n_l -> 0``, written in the ``E`` symbols.

    Every ``C_l`` is replaced by ``rho_l I + sqrt(p/n_l) E_l``.  ``ratios[l]``
    is ``lim n/n_l`` for the reference size ``n`` of the prefactor (``None`` or
    ``float('inf')`` for a divergent ratio).  After expansion a term with ``d``
    E-letters carries ``(p/n)^((d-1)/2)`` times the square roots of the ratios:
    d = 0 terms diverge unless they cancel, d >= 2 terms vanish, and the d = 1
    terms survive with coefficient ``prod(other rho) * sqrt(ratios[l])``.

    >>> c = NCPolynomial.letter(1)
    >>> centered_scaled_limit(c - NCPolynomial.identity(coef="1/2"), {1: "1/2"}, {1: 1})
    NCPolynomial((1)*E1)
    """
    if a.symbol != "C":
        raise DomainError("centered_scaled_limit expects a polynomial in the C symbols")
    rho = {int(l): to_fraction(r) for l, r in rhos.items()}
    constant: Fraction = Fraction(0)
    linear: dict[StarWord, Coef] = {}
    for w, c in a.terms.items():
        for l in w:
            if l.label not in rho:
                raise DomainError(f"no rho given for label {l.label}")
        prod_all = Fraction(1)
        for l in w:
            prod_all *= rho[l.label]
        constant += c * prod_all
        for i, l in enumerate(w):
            coef = c
            for j, other in enumerate(w):
                if j != i:
                    coef = coef * rho[other.label]
            if not coef:
                continue
            key = StarWord([l])
            linear[key] = linear.get(key, Fraction(0)) + coef
    if constant:
        raise DivergentLimitError(
            f"identity coefficient {constant} does not cancel; sqrt(n/p) * {constant} * I diverges"
        )
    out: dict[StarWord, Coef] = {}
    for w, coef in linear.items():
        if not coef:
            continue
        label = w[0].label
        if label not in ratios:
            raise DomainError(f"no ratio given for label {label}")
        r = ratios[label]
        if r is None or (isinstance(r, float) and r == float("inf")):
            raise DivergentLimitError(f"ratio n/n_{label} diverges in a surviving term")
        r = to_fraction(r)
        if r < 0:
            raise DomainError(f"ratio for label {label} is negative")
        if r == 0:
            continue
        out[w] = coef * Surd.sqrt(r)
    return NCPolynomial(out, "E")


# -- text syntax ------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:/\d+)?|\.\d+)|(?P<sym>[CE]\d+)(?P<adj>\^\*)?|(?P<id>I)|(?P<op>[-+*]))"
)


def _tokens(text: str):
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialParseError(f"unexpected character {text[col]!r}", col)
        start = m.start(m.lastgroup) if m.lastgroup != "adj" else m.start("sym")
        if m.group("num") is not None:
            try:
                yield "num", Fraction(m.group("num")), start
            except (ValueError, ZeroDivisionError):
                raise PolynomialParseError(f"bad number {m.group('num')!r}", start) from None
        elif m.group("sym") is not None:
            yield "sym", (m.group("sym")[0], int(m.group("sym")[1:]), m.group("adj") is not None), start
        elif m.group("id") is not None:
            yield "id", None, start
        else:
            yield "op", m.group("op"), start
        pos = m.end()
    yield "end", None, len(text)


def parse_polynomial(text: str) -> NCPolynomial:
    """Parse the CLI polynomial syntax.

    >>> str(parse_polynomial("C1*C1^* + -1/2*I"))
    '(-1/2)*I + (1)*C1*C1^*'
    """
    toks = list(_tokens(text))
    i = 0
    symbol: Optional[str] = None
    terms: dict[StarWord, Fraction] = {}

    def peek():
        return toks[i]

    sign = Fraction(1)
    kind, val, pos = peek()
    if kind == "op" and val in "+-":
        sign = Fraction(-1 if val == "-" else 1)
        i += 1
    while True:
        coef = sign
        letters: list[Letter] = []
        expect_factor = True
        while expect_factor:
            kind, val, pos = toks[i]
            if kind == "op" and val == "-" and toks[i + 1][0] == "num":
                coef = -coef
                i += 1
                kind, val, pos = toks[i]
            if kind == "num":
                coef *= val
            elif kind == "id":
                pass
            elif kind == "sym":
                s, label, adj = val
                if label < 1:
                    raise PolynomialParseError(f"labels start at 1, got {s}{label}", pos)
                if symbol is None:
                    symbol = s
                elif symbol != s:
                    raise PolynomialParseError("cannot mix C and E symbols in one polynomial", pos)
                letters.append(Letter(label, adj))
            else:
                what = "end of input" if kind == "end" else repr(val)
                raise PolynomialParseError(f"expected a number, I or a symbol, found {what}", pos)
            i += 1
            kind, val, pos = toks[i]
            if kind == "op" and val == "*":
                i += 1
            else:
                expect_factor = False
        w = StarWord(letters)
        terms[w] = terms.get(w, Fraction(0)) + coef
        kind, val, pos = toks[i]
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            sign = Fraction(-1 if val == "-" else 1)
            i += 1
            continue
        raise PolynomialParseError(f"expected '+', '-' or end of input, found {val!r}", pos)
    return NCPolynomial(terms, symbol or "C")
