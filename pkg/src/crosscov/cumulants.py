"""Moment/free-cumulant transforms over NC(n) and the exact joint *-moments of
free families of cross-covariance and elliptic variables.

All limit-side values are exact :class:`fractions.Fraction` objects.
"""
from __future__ import annotations

import functools
import threading
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence, Union

from . import kernels
from .errors import DomainError, SizeLimitError, current_limits
from .partitions import NCPartition, _nc2_partners, _nc_rgs, nc_block_lists, nc_mobius_table

Scalar = Union[Fraction, int, str, float]

PLAIN = False
STAR = True


def to_fraction(x: Scalar) -> Fraction:
    """Exact conversion; floats go through their shortest repr (0.4 -> 2/5)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


class Letter(NamedTuple):
    label: int
    star: bool = False

    def adjoint(self) -> "Letter":
        return Letter(self.label, not self.star)

    def __str__(self) -> str:
        return f"{self.label}{'*' if self.star else ''}"


class StarWord(tuple):
    """An immutable word of :class:`Letter` objects; the empty word is the unit.

    >>> StarWord.parse("1 1* 2")
    StarWord('1 1* 2')
    """

    def __new__(cls, letters: Iterable = ()):
        if isinstance(letters, str):
            letters = letters.replace(",", " ").split()
        out = []
        for a in letters:
            if isinstance(a, Letter):
                out.append(a)
            elif isinstance(a, str):
                out.append(Letter(int(a.rstrip("*")), a.endswith("*")))
            else:
                label, star = a
                out.append(Letter(int(label), bool(star)))
        for a in out:
            if a.label < 1:
                raise DomainError(f"labels must be positive, got {a.label}")
        return super().__new__(cls, out)

    @classmethod
    def parse(cls, text: str) -> "StarWord":
        return cls(text)

    @classmethod
    def power(cls, label: int, etas: Sequence[bool]) -> "StarWord":
        return cls(Letter(label, bool(e)) for e in etas)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(a.label for a in self)

    @property
    def etas(self) -> tuple[bool, ...]:
        return tuple(a.star for a in self)

    def subword(self, positions: Iterable[int]) -> "StarWord":
        """Letters at the given 0-based positions, order preserved."""
        return tuple.__new__(StarWord, [self[i] for i in positions])

    def adjoint(self) -> "StarWord":
        return tuple.__new__(StarWord, [a.adjoint() for a in reversed(self)])

    def rotate(self, r: int) -> "StarWord":
        if not self:
            return self
        r %= len(self)
        return tuple.__new__(StarWord, tuple(self[r:]) + tuple(self[:r]))

    def __add__(self, other) -> "StarWord":
        return tuple.__new__(StarWord, tuple(self) + tuple(other))

    def __getitem__(self, item):
        got = tuple.__getitem__(self, item)
        if isinstance(item, slice):
            return tuple.__new__(StarWord, got)
        return got

    def __str__(self) -> str:
        return " ".join(map(str, self))

    def __repr__(self) -> str:
        return f"StarWord({str(self)!r})"


def _check_len(n: int) -> None:
    cap = current_limits().word_max
    if n > cap:
        raise SizeLimitError(f"word length {n} exceeds word_max={cap}")


class MomentFunctional:
    """A (memoised) state on words: ``phi(w)``; ``phi(empty) == 1``."""

    def __init__(self, evaluator: Callable[[StarWord], object], name: str = "custom"):
        self.name = name
        self._evaluator = evaluator
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __call__(self, w) -> Fraction:
        if not isinstance(w, StarWord):
            w = StarWord(w)
        if not w:
            return Fraction(1)
        try:
            return self._cache[w]
        except KeyError:
            pass
        value = self._evaluator(w)
        with self._lock:
            self._cache.setdefault(w, value)
        return value

    def __repr__(self) -> str:
        return f"MomentFunctional({self.name!r})"


class CumulantFunctional(MomentFunctional):
    """Free cumulants on words of length >= 1."""

    def __call__(self, w) -> Fraction:
        if not isinstance(w, StarWord):
            w = StarWord(w)
        if not w:
            raise DomainError("free cumulants have order >= 1")
        return super().__call__(w)

    def __repr__(self) -> str:
        return f"CumulantFunctional({self.name!r})"


def _blocks_of(p: NCPartition) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(x - 1 for x in b) for b in p.blocks)


def phi_pi(p: NCPartition, w, phi: MomentFunctional):
    """Multiplicative extension: product over blocks of phi(subword on block)."""
    w = StarWord(w)
    if p.n != len(w):
        raise DomainError(f"partition of {p.n} points vs word of length {len(w)}")
    out = Fraction(1)
    for b in _blocks_of(p):
        out *= phi(w.subword(b))
    return out


def kappa_pi(p: NCPartition, w, kappa: CumulantFunctional):
    return phi_pi(p, w, kappa)


def moments_from_cumulants(w, kappa: CumulantFunctional):
    """phi(w) = sum over NC(|w|) of the multiplicative cumulant extension."""
    w = StarWord(w)
    n = len(w)
    if n == 0:
        return Fraction(1)
    _check_len(n)
    total = 0
    for blocks in nc_block_lists(n):
        term = 1
        for b in blocks:
            term *= kappa(w.subword(b))
            if not term:
                break
        total += term
    return total


def cumulants_from_moments(w, phi: MomentFunctional):
    """kappa_n(w) = sum over NC(n) of phi_sigma(w) * mu(sigma, 1_n)."""
    w = StarWord(w)
    n = len(w)
    if n == 0:
        raise DomainError("free cumulants have order >= 1")
    _check_len(n)
    total = 0
    for blocks, mu in zip(nc_block_lists(n), nc_mobius_table(n)):
        term = mu
        for b in blocks:
            term *= phi(w.subword(b))
            if not term:
                break
        total += term
    return total


def cumulant_functional_of(phi: MomentFunctional) -> CumulantFunctional:
    return CumulantFunctional(lambda w: cumulants_from_moments(w, phi), f"cumulants[{phi.name}]")


def moment_functional_of(kappa: CumulantFunctional) -> MomentFunctional:
    return MomentFunctional(lambda w: moments_from_cumulants(w, kappa), f"moments[{kappa.name}]")


# -- cross-covariance variables --------------------------------------------


def s_statistic(etas: Sequence[bool]) -> int:
    """Cyclic number of equal neighbouring exponents (the last wraps to the first)."""
    k = len(etas)
    if k == 0:
        raise DomainError("exponent word must be nonempty")
    return sum(bool(etas[u]) == bool(etas[(u + 1) % k]) for u in range(k))


def t_block_statistic(block: Sequence[int], etas: Sequence[bool]) -> int:
    """``s_statistic`` of the exponents restricted to ``block`` (1-based, sorted)."""
    if not block or any(i < 1 or i > len(etas) for i in block):
        raise DomainError(f"block {list(block)} not inside 1..{len(etas)}")
    return s_statistic([etas[i - 1] for i in sorted(block)])


class FamilyParams:
    """Per-label ``(rho_l, y_l)`` of a free family of cross-covariance variables.

    >>> FamilyParams({1: ("1/2", "1/2")}).rho(1)
    Fraction(1, 2)
    """

    def __init__(self, params: Mapping[int, tuple[Scalar, Scalar]]):
        self._rho: dict[int, Fraction] = {}
        self._y: dict[int, Fraction] = {}
        for label, (rho, y) in params.items():
            rho, y = to_fraction(rho), to_fraction(y)
            if abs(rho) > 1:
                raise DomainError(f"|rho_{label}| = {abs(rho)} > 1")
            if y < 0:
                raise DomainError(f"y_{label} = {y} < 0")
            self._rho[int(label)] = rho
            self._y[int(label)] = y

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(self._rho))

    def rho(self, label: int) -> Fraction:
        try:
            return self._rho[label]
        except KeyError:
            raise DomainError(f"unknown label {label}") from None

    def y(self, label: int) -> Fraction:
        try:
            return self._y[label]
        except KeyError:
            raise DomainError(f"unknown label {label}") from None

    def key(self):
        return tuple((l, self._rho[l], self._y[l]) for l in self.labels)

    def __eq__(self, other):
        return isinstance(other, FamilyParams) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self) -> str:
        inner = ", ".join(f"{l}: (rho={self._rho[l]}, y={self._y[l]})" for l in self.labels)
        return f"FamilyParams({{{inner}}})"


def _rho_power(rho: Fraction, s: int) -> Fraction:
    # rho = 0 is its own branch: only S = 0 survives
    if rho == 0:
        return Fraction(1 if s == 0 else 0)
    return rho**s


def cc_cumulant(etas: Sequence[bool], rho: Scalar, y: Scalar) -> Fraction:
    """Marginal free cumulant of a cross-covariance variable: y^(k-1) rho^S."""
    rho, y = to_fraction(rho), to_fraction(y)
    if y <= 0:
        raise DomainError("cross-covariance cumulants need y > 0; use the elliptic regime for y = 0")
    if abs(rho) > 1:
        raise DomainError(f"|rho| = {abs(rho)} > 1")
    return y ** (len(etas) - 1) * _rho_power(rho, s_statistic(etas))


def _canonical_labels(labels: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    order: dict[int, int] = {}
    relabelled = tuple(order.setdefault(l, len(order)) for l in labels)
    return relabelled, tuple(order)


@functools.lru_cache(maxsize=4096)
def _cc_tally(labels: tuple[int, ...], etas: tuple[bool, ...], nlabels: int):
    raw = kernels.cc_tally(_nc_rgs(len(labels)), labels, [int(e) for e in etas], nlabels)
    n = len(labels)
    return tuple(sorted((kernels.decode_key(k, n, 2 * nlabels), c) for k, c in raw.items()))


def cc_moment_polynomial(w) -> tuple[tuple[int, ...], list[tuple[tuple[int, ...], tuple[int, ...], int]]]:
    """Joint moment of a free cross-covariance family as a polynomial.

    Returns ``(labels, terms)``; each term ``(y_exps, rho_exps, count)`` stands
    for ``count * prod_l y_l^y_exps[l] * rho_l^rho_exps[l]`` over the distinct
    labels of ``w`` in order of first appearance.
    """
    w = StarWord(w)
    _check_len(len(w))
    rel, distinct = _canonical_labels(w.labels)
    t = len(distinct)
    terms = [(e[:t], e[t:], c) for e, c in _cc_tally(rel, w.etas, t)]
    return distinct, terms


def cc_family_moment(w, params: FamilyParams) -> Fraction:
    """phi(c_{a1}^{e1} ... c_{ak}^{ek}) for free cross-covariance variables.

    Sum over the non-crossing partitions whose blocks are label-constant of the
    product of block cumulants ``y_l^(|V|-1) rho_l^T(V)``.
    """
    w = StarWord(w)
    if not w:
        return Fraction(1)
    distinct, terms = cc_moment_polynomial(w)
    ys = [params.y(l) for l in distinct]
    rhos = [params.rho(l) for l in distinct]
    for l, y in zip(distinct, ys):
        if y <= 0:
            raise DomainError(f"y_{l} = {y}: cross-covariance moments need y > 0")
    total = Fraction(0)
    for yexp, rexp, count in terms:
        term = Fraction(count)
        for y, a in zip(ys, yexp):
            term *= y**a
        for rho, b in zip(rhos, rexp):
            term *= _rho_power(rho, b)
            if not term:
                break
        total += term
    return total


def cc_free_cumulants(params: FamilyParams) -> CumulantFunctional:
    """Cumulant functional of the free family: marginal cumulants, mixed ones 0."""

    def kappa(w: StarWord) -> Fraction:
        labels = set(w.labels)
        if len(labels) > 1:
            return Fraction(0)
        (l,) = labels
        return cc_cumulant(w.etas, params.rho(l), params.y(l))

    return CumulantFunctional(kappa, "cross-covariance cumulants")


def cc_family_moment_generic(w, params: FamilyParams) -> Fraction:
    """Same value as :func:`cc_family_moment`, via the moment-cumulant formula."""
    return moments_from_cumulants(w, cc_free_cumulants(params))


@functools.lru_cache(maxsize=64)
def cc_moments(params: FamilyParams) -> MomentFunctional:
    return MomentFunctional(lambda w: cc_family_moment(w, params), "cross-covariance")


# -- elliptic variables -------------------------------------------------------


def elliptic_cumulant(etas: Sequence[bool], r: Scalar) -> Fraction:
    """kappa_2(e, e) = kappa_2(e*, e*) = r, kappa_2(e, e*) = 1, others 0."""
    r = to_fraction(r)
    if len(etas) != 2:
        return Fraction(0)
    return r if bool(etas[0]) == bool(etas[1]) else Fraction(1)


@functools.lru_cache(maxsize=4096)
def _pair_tally(labels: tuple[int, ...], etas: tuple[bool, ...], nlabels: int):
    raw = kernels.pair_tally(_nc2_partners(len(labels)), labels, [int(e) for e in etas], nlabels)
    return tuple(sorted((kernels.decode_key(k, len(labels), nlabels), c) for k, c in raw.items()))


def _as_param_map(rhos) -> Mapping[int, Fraction]:
    if isinstance(rhos, Mapping):
        out = {int(l): to_fraction(r) for l, r in rhos.items()}
    else:
        out = {1: to_fraction(rhos)}
    for l, r in out.items():
        if abs(r) > 1:
            raise DomainError(f"elliptic parameter {r} for label {l} outside [-1, 1]")
    return out


def elliptic_family_moment(w, rhos) -> Fraction:
    """Joint moment of free elliptic variables with parameters ``rhos[label]``.

    Sum over non-crossing pairings matching equal labels of
    ``prod_l rho_l^(number of equal-exponent pairs of label l)``.
    """
    w = StarWord(w)
    if not w:
        return Fraction(1)
    if len(w) % 2:
        return Fraction(0)
    _check_len(len(w))
    params = _as_param_map(rhos)
    rel, distinct = _canonical_labels(w.labels)
    try:
        rs = [params[l] for l in distinct]
    except KeyError as exc:
        raise DomainError(f"unknown label {exc.args[0]}") from None
    total = Fraction(0)
    for exps, count in _pair_tally(rel, w.etas, len(distinct)):
        term = Fraction(count)
        for r, e in zip(rs, exps):
            term *= _rho_power(r, e)
        total += term
    return total


def elliptic_free_cumulants(rhos) -> CumulantFunctional:
    params = _as_param_map(rhos)

    def kappa(w: StarWord) -> Fraction:
        if len(w) != 2 or w[0].label != w[1].label:
            return Fraction(0)
        try:
            r = params[w[0].label]
        except KeyError:
            raise DomainError(f"unknown label {w[0].label}") from None
        return elliptic_cumulant(w.etas, r)

    return CumulantFunctional(kappa, "elliptic cumulants")


def elliptic_moments(rhos) -> MomentFunctional:
    params = dict(_as_param_map(rhos))
    return MomentFunctional(lambda w: elliptic_family_moment(w, params), "elliptic")


def is_free_check(w, backend: Union[FamilyParams, MomentFunctional]) -> bool:
    """True iff the mixed joint cumulant of ``w`` vanishes exactly.

    ``backend`` is either :class:`FamilyParams` (cross-covariance family) or any
    :class:`MomentFunctional`.
    """
    w = StarWord(w)
    if len(set(w.labels)) < 2:
        raise DomainError("a mixed cumulant needs at least two distinct labels")
    phi = cc_moments(backend) if isinstance(backend, FamilyParams) else backend
    return cumulants_from_moments(w, phi) == 0
