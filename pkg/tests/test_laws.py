import itertools
from fractions import Fraction as F

import pytest

from crosscov import (
    DomainError,
    FamilyParams,
    LawKind,
    LawSpec,
    MomentFunctional,
    SizeLimitError,
    StarWord,
    c_plus_cstar_cumulant,
    cc_moments,
    cc_star_law_moment_rho0,
    cc_star_moment_rho0,
    compound_poisson_moment,
    cumulants_from_moments,
    limits,
    moments_from_cumulants,
    mp_moment,
    mp_moment_narayana,
    parse_polynomial,
    poly_cumulant,
    poly_moment,
    prod_alt_cumulant,
    prod_alt_cumulant_free_product,
    sym_mp_cumulant,
)
from crosscov.laws import moments_from_cumulant_sequence

from oracles import narayana_mp

YS = [F(1, 3), F(1), F(5, 2)]


@pytest.mark.parametrize("y", YS)
def test_mp_moment(y):
    assert mp_moment(1, y) == 1
    assert mp_moment(2, y) == 1 + y
    assert mp_moment(3, y) == 1 + 3 * y + y**2
    for k in range(9):
        assert mp_moment(k, y) == mp_moment_narayana(k, y) == narayana_mp(k, y)
    with pytest.raises(DomainError):
        mp_moment(2, 0)


def test_sym_mp():
    y = F(2, 3)
    assert [sym_mp_cumulant(k, y) for k in (2, 3, 4)] == [y, 0, y**3]
    kappas = [sym_mp_cumulant(j, y) for j in range(1, 9)]
    assert all(moments_from_cumulant_sequence(kappas, k) == 0 for k in (1, 3, 5, 7))
    with pytest.raises(DomainError):
        sym_mp_cumulant(0, y)


@pytest.mark.parametrize("y", YS)
def test_cc_star_rho0(y):
    assert cc_star_moment_rho0(1, y) == y
    assert cc_star_moment_rho0(2, y) == y**2 + y**3
    for k in range(1, 7):
        assert cc_star_moment_rho0(k, y) == y**k * mp_moment(k, y)


def test_cc_star_against_engine():
    y = F(2, 5)
    phi = cc_moments(FamilyParams({1: (0, y)}))
    cc = parse_polynomial("C1*C1^*")
    assert cumulants_from_moments("1 1*", phi) == cc_star_moment_rho0(1, y)
    for k in range(1, 5):
        assert poly_cumulant(cc, k, phi) == cc_star_moment_rho0(k, y)
        assert poly_moment(cc, k, phi) == cc_star_law_moment_rho0(k, y)


def test_c_plus_cstar_examples():
    y = F(3, 4)
    for k in range(1, 9):
        assert c_plus_cstar_cumulant(k, y, 0) == (2 * y ** (k - 1) if k % 2 == 0 else 0)
    assert c_plus_cstar_cumulant(2, y, 1) == 4 * y
    with pytest.raises(SizeLimitError):
        c_plus_cstar_cumulant(17, y, 0)


@pytest.mark.parametrize("rho", [F(0), F(1, 3), F(-3, 4), F(1)])
def test_c_plus_cstar_against_polynomial_engine(rho):
    y = F(3, 2)
    phi = cc_moments(FamilyParams({1: (rho, y)}))
    a = parse_polynomial("C1 + C1^*")
    for k in range(1, 7):
        assert poly_cumulant(a, k, phi) == c_plus_cstar_cumulant(k, y, rho)


def test_prod_alt_examples():
    y1, y2 = F(1, 2), F(3)
    assert prod_alt_cumulant(1, y1, y2) == y1 * y2
    for k in range(1, 5):
        assert prod_alt_cumulant(k, y1, y2) == prod_alt_cumulant_free_product(k, y1, y2)


@pytest.mark.parametrize("k", [1, 2])
def test_prod_alt_against_engine(k):
    y1, y2 = F(2, 3), F(1, 4)
    params = FamilyParams({1: (0, y1), 2: (0, y2)})
    phi = cc_moments(params)
    # a = c1 c2^*, a^* = c2 c1^*; the alternating cumulant of (a, a*, ...) of order 2k
    a, astar = parse_polynomial("C1*C2^*"), parse_polynomial("C2*C1^*")
    word_a, word_as = next(iter(a.terms)), next(iter(astar.terms))
    # Moebius inversion over a word in the compound letters a, a*
    def compound(w):
        full = StarWord()
        for l in w:
            full = full + (word_as if l.star else word_a)
        return phi(full)

    with limits(word_max=8):
        kappa = cumulants_from_moments(StarWord([(1, False), (1, True)] * k), MomentFunctional(compound))
        assert kappa == prod_alt_cumulant(k, y1, y2)
        non_alt = cumulants_from_moments(StarWord([(1, False), (1, False)] * k), MomentFunctional(compound))
        assert non_alt == 0


def test_compound_poisson():
    y = F(2, 7)
    jumps = [y**j for j in range(1, 7)]
    assert all(compound_poisson_moment(k, 1 / y, jumps) == mp_moment(k, y) for k in range(1, 7))
    ymp = [y**j * mp_moment(j, y) for j in range(1, 6)]
    assert all(compound_poisson_moment(k, 1, ymp) == cc_star_law_moment_rho0(k, y) for k in range(1, 6))
    assert all(compound_poisson_moment(k, 0, ymp) == 0 for k in range(1, 6))
    sym = [compound_poisson_moment(k, 1, ymp, symmetrized=True) for k in range(1, 6)]
    assert sym[0] == sym[2] == sym[4] == 0
    with pytest.raises(DomainError):
        compound_poisson_moment(4, 1, jumps[:2])


def test_law_spec():
    y = F(1, 2)
    assert LawSpec(LawKind.MP, y).moments(4).values == tuple(mp_moment(k, y) for k in range(1, 5))
    seq = LawSpec(LawKind.CC_STAR, y).moments(3)
    assert seq[0] == 1 and seq.order == 3
    assert LawSpec(LawKind.PROD_ALT, y, y2=F(2)).cumulant(3) == 0
    assert LawSpec(LawKind.PROD_ALT, y, y2=F(2)).cumulant(2) == 2 * prod_alt_cumulant(1, y, 2)
    assert LawSpec(LawKind.C_PLUS_CSTAR, y, rho=0).cumulant(4) == 2 * y**3
    assert LawSpec(LawKind.SYM_MP, y).moments(3)[3] == 0
    with pytest.raises(DomainError):
        LawSpec(LawKind.MP, 0)
    with pytest.raises(DomainError):
        LawSpec(LawKind.PROD_ALT, y)
    with pytest.raises(DomainError):
        LawSpec(LawKind.C_PLUS_CSTAR, y, rho=2)
