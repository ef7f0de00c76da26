"""Closed-form moment and cumulant sequences of the named limit laws.

Each closed form has a twin computed through the generic moment-cumulant
machinery so the two can be checked against each other.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .cumulants import (
    CumulantFunctional,
    Scalar,
    StarWord,
    moments_from_cumulants,
    s_statistic,
    to_fraction,
    _rho_power,
)
from .errors import DomainError, SizeLimitError
from .partitions import enumerate_nc, kreweras_complement, leq

__all__ = [
    "MomentSequence",
    "LawKind",
    "LawSpec",
    "moments_from_cumulant_sequence",
    "mp_moment",
    "mp_moment_narayana",
    "sym_mp_cumulant",
    "cc_star_moment_rho0",
    "cc_star_law_moment_rho0",
    "c_plus_cstar_cumulant",
    "prod_alt_cumulant",
    "prod_alt_cumulant_free_product",
    "compound_poisson_moment",
]


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``m_1..m_order`` of a law (``values[k - 1] == m_k``)."""

    values: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Fraction:
        if k == 0:
            return Fraction(1)
        return self.values[k - 1]


def _positive(name: str, v: Scalar) -> Fraction:
    v = to_fraction(v)
    if v <= 0:
        raise DomainError(f"{name} must be > 0, got {v}")
    return v


def moments_from_cumulant_sequence(kappas: Sequence[Scalar], k: int) -> Fraction:
    """k-th moment of a single self-adjoint variable from ``kappas[j-1] = kappa_j``."""
    if k == 0:
        return Fraction(1)
    if len(kappas) < k:
        raise DomainError(f"need {k} cumulants, got {len(kappas)}")
    ks = [to_fraction(v) for v in kappas]
    kappa = CumulantFunctional(lambda w: ks[len(w) - 1], "sequence")
    return moments_from_cumulants(StarWord.power(1, [False] * k), kappa)


def mp_moment(k: int, y: Scalar) -> Fraction:
    """k-th moment of the Marchenko-Pastur law (free cumulants y^(j-1))."""
    y = _positive("y", y)
    return moments_from_cumulant_sequence([y ** (j - 1) for j in range(1, k + 1)], k)


def mp_moment_narayana(k: int, y: Scalar) -> Fraction:
    y = _positive("y", y)
    if k == 0:
        return Fraction(1)
    return sum(Fraction(comb(k, r) * comb(k - 1, r), r + 1) * y**r for r in range(k))


def sym_mp_cumulant(k: int, y: Scalar) -> Fraction:
    """Free cumulants of the symmetrised MP law: y^(k-1) for even k, else 0."""
    if k < 1:
        raise DomainError("cumulant order must be >= 1")
    y = _positive("y", y)
    return y ** (k - 1) if k % 2 == 0 else Fraction(0)


def cc_star_moment_rho0(k: int, y: Scalar) -> Fraction:
    """k-th free cumulant of cc* at rho = 0, which is the k-th moment of y*MP(y)."""
    if k < 1:
        raise DomainError("order must be >= 1")
    y = _positive("y", y)
    return sum(Fraction(comb(k - 1, r) * comb(k, r), r + 1) * y ** (k + r) for r in range(k))


def cc_star_law_moment_rho0(k: int, y: Scalar) -> Fraction:
    """k-th moment of cc* at rho = 0 (compound free Poisson with rate 1, jump y*MP(y))."""
    return moments_from_cumulant_sequence([cc_star_moment_rho0(j, y) for j in range(1, k + 1)], k)


def c_plus_cstar_cumulant(k: int, y: Scalar, rho: Scalar) -> Fraction:
    """kappa_k(c + c*) by multilinearity over all 2^k exponent words."""
    if k < 1:
        raise DomainError("order must be >= 1")
    if k > 16:
        raise SizeLimitError(f"2^{k} exponent words is beyond the k <= 16 bound")
    y, rho = _positive("y", y), to_fraction(rho)
    if abs(rho) > 1:
        raise DomainError(f"|rho| = {abs(rho)} > 1")
    total = sum(_rho_power(rho, s_statistic(etas)) for etas in itertools.product((False, True), repeat=k))
    return y ** (k - 1) * total


def prod_alt_cumulant(k: int, y1: Scalar, y2: Scalar) -> Fraction:
    """Alternating cumulant kappa_2k(a, a*, ..., a, a*) of a = c1 c2* at rho1 = rho2 = 0.

    Double sum over pi in NC(k) and sigma <= K(pi) of
    y1^(2k - |pi|) * y2^(2k - |sigma|).
    """
    if k < 1:
        raise DomainError("order must be >= 1")
    y1, y2 = _positive("y1", y1), _positive("y2", y2)
    total = Fraction(0)
    for pi in enumerate_nc(k):
        below = [s for s in enumerate_nc(k) if leq(s, kreweras_complement(pi))]
        total += y1 ** (2 * k - len(pi)) * sum(y2 ** (2 * k - len(s)) for s in below)
    return total


def prod_alt_cumulant_free_product(k: int, y1: Scalar, y2: Scalar) -> Fraction:
    """phi((a b)^k) for free a = y1 MP(y1), b = y2 MP(y2); same value as
    :func:`prod_alt_cumulant`.  Cumulants of ``a`` on pi, moments of ``b`` on K(pi).
    """
    if k < 1:
        raise DomainError("order must be >= 1")
    y1, y2 = _positive("y1", y1), _positive("y2", y2)
    total = Fraction(0)
    for pi in enumerate_nc(k):
        ka = Fraction(1)
        for v in pi.blocks:
            ka *= y1 ** (2 * len(v) - 1)
        mb = Fraction(1)
        for w in kreweras_complement(pi).blocks:
            mb *= y2 ** len(w) * mp_moment_narayana(len(w), y2)
        total += ka * mb
    return total


def compound_poisson_moment(
    k: int, rate: Scalar, jump_moments: Sequence[Scalar], symmetrized: bool = False
) -> Fraction:
    """k-th moment of the compound free Poisson law P(rate, jump).

    Free cumulants are ``rate * (j-th jump moment)``; with ``symmetrized`` the
    odd cumulants are set to zero.
    """
    if len(jump_moments) < k:
        raise DomainError(f"need {k} jump moments, got {len(jump_moments)}")
    rate = to_fraction(rate)
    kappas = [rate * to_fraction(m) for m in jump_moments[:k]]
    if symmetrized:
        kappas = [v if j % 2 == 0 else Fraction(0) for j, v in enumerate(kappas, start=1)]
    return moments_from_cumulant_sequence(kappas, k)


class LawKind(enum.Enum):
    MP = "mp"
    SYM_MP = "sym_mp"
    CC_STAR = "cc_star"
    C_PLUS_CSTAR = "c_plus_cstar"
    PROD_ALT = "prod_alt"


@dataclass(frozen=True)
class LawSpec:
    """A named self-adjoint limit law.

    ``CC_STAR`` is cc* at rho = 0 and ``PROD_ALT`` is c1 c2* + c2 c1* at
    rho1 = rho2 = 0 (only even cumulants, twice the alternating cumulants of c1 c2*).
    """

    kind: LawKind
    y: Fraction
    rho: Fraction = Fraction(0)
    y2: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "y", _positive("y", self.y))
        object.__setattr__(self, "rho", to_fraction(self.rho))
        object.__setattr__(self, "y2", to_fraction(self.y2))
        if abs(self.rho) > 1:
            raise DomainError(f"|rho| = {abs(self.rho)} > 1")
        if self.kind is LawKind.PROD_ALT and self.y2 <= 0:
            raise DomainError("PROD_ALT needs y2 > 0")

    def cumulant(self, k: int) -> Fraction:
        if k < 1:
            raise DomainError("cumulant order must be >= 1")
        if self.kind is LawKind.MP:
            return self.y ** (k - 1)
        if self.kind is LawKind.SYM_MP:
            return sym_mp_cumulant(k, self.y)
        if self.kind is LawKind.CC_STAR:
            return cc_star_moment_rho0(k, self.y)
        if self.kind is LawKind.C_PLUS_CSTAR:
            return c_plus_cstar_cumulant(k, self.y, self.rho)
        if k % 2:
            return Fraction(0)
        return 2 * prod_alt_cumulant(k // 2, self.y, self.y2)

    def moments(self, order: int) -> MomentSequence:
        kappas = [self.cumulant(j) for j in range(1, order + 1)]
        return MomentSequence(tuple(moments_from_cumulant_sequence(kappas, k) for k in range(1, order + 1)))
