from fractions import Fraction as F

import numpy as np
import pytest

from crosscov import DomainError, FamilyParams, ResourceLimitError, StarWord, cc_family_moment, limits, mp_moment
from crosscov import EigenSolverError, parse_polynomial
from crosscov.lab import (
    Dist,
    EnsembleConfig,
    MomentEstimate,
    Regime,
    SpectralSample,
    SpectrumKind,
    centered_scaled,
    cross_covariance,
    empirical_functional,
    esd_moments,
    eval_matrix_poly,
    monte_carlo,
    monte_carlo_poly_moments,
    monte_carlo_word_moment,
    monte_carlo_word_moments,
    replicate_rng,
    sample_family,
    sample_pair,
    spectrum,
    trace_moments,
)


def within(est: MomentEstimate, exact, c=0.0):
    return abs(est.mean - float(exact)) <= 5 * est.std_error + c


@pytest.mark.parametrize("dist", list(Dist))
def test_rho_one_gives_identical_matrices(dist):
    x, y = sample_pair(5, 7, 1.0, dist, replicate_rng(1, 0, 1))
    assert np.array_equal(x, y)


@pytest.mark.parametrize("dist", list(Dist))
@pytest.mark.parametrize("rho", [0.0, 0.3, -0.7])
def test_entry_moments(dist, rho):
    x, y = sample_pair(1000, 1000, rho, dist, replicate_rng(7, 0, 1))
    prod = (x * y).ravel()
    se = prod.std() / np.sqrt(prod.size)
    assert abs(prod.mean() - rho) <= 5 * se
    for m in (x, y):
        assert abs(m.mean()) <= 5 / 1000
        assert abs(m.var() - 1) <= 5 * np.sqrt(2) / 1000 * (1 if dist is Dist.GAUSSIAN else 0.1) + 1e-12


def test_rademacher_values():
    x, y = sample_pair(20, 30, 0.2, Dist.RADEMACHER, replicate_rng(3, 0, 1))
    assert set(np.unique(x)) <= {-1.0, 1.0} and set(np.unique(y)) <= {-1.0, 1.0}


def test_sample_pair_errors():
    with pytest.raises(DomainError):
        sample_pair(2, 2, 1.5, Dist.GAUSSIAN, replicate_rng(0, 0, 1))
    with limits(entries_max=100):
        with pytest.raises(ResourceLimitError):
            sample_pair(10, 10, 0.0, Dist.GAUSSIAN, replicate_rng(0, 0, 1))


def test_cross_covariance():
    assert np.array_equal(cross_covariance(np.array([[2.0]]), np.array([[3.0]])), np.array([[6.0]]))
    x, _ = sample_pair(6, 9, 1.0, Dist.GAUSSIAN, replicate_rng(0, 0, 1))
    s = cross_covariance(x, x)
    assert np.allclose(s, s.T) and np.linalg.eigvalsh(s).min() > -1e-12
    with pytest.raises(DomainError):
        cross_covariance(np.ones((2, 3)), np.ones((3, 2)))


def test_centered_scaled():
    rho = 0.25
    assert not centered_scaled(rho * np.eye(4), rho, 10, 4).any()
    c = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(centered_scaled(c, 0.5, 3, 3), c - 0.5 * np.eye(3))
    with pytest.raises(DomainError):
        centered_scaled(c, 0.5, 3, 4)


def test_config_validation():
    with pytest.raises(DomainError):
        EnsembleConfig(0, {1: (5, 0.0)})
    with pytest.raises(DomainError):
        EnsembleConfig(5, {1: (5, 1.5)})
    with pytest.raises(DomainError):
        EnsembleConfig(5, {1: (0, 0.5)})
    with pytest.raises(DomainError):
        EnsembleConfig(5, {1: (5, 0.5)}, replicates=0)
    cfg = EnsembleConfig(5, {2: (7, 0.5), 1: (3, 0)}, dist="rademacher")
    assert cfg.labels == (1, 2) and cfg.dist is Dist.RADEMACHER and cfg.n(2) == 7


def test_eval_matrix_poly():
    fam = sample_family(EnsembleConfig(6, {1: (8, 0.3), 2: (5, -0.2)}, seed=4))
    c1, c2 = fam.c[1], fam.c[2]
    m = eval_matrix_poly(parse_polynomial("C1 + C1^*"), fam)
    assert np.allclose(m, c1 + c1.T) and np.array_equal(m, m.T)
    assert np.array_equal(eval_matrix_poly(parse_polynomial("I"), fam), np.eye(6))
    g = eval_matrix_poly(parse_polynomial("C1*C1^*"), fam)
    assert np.linalg.eigvalsh((g + g.T) / 2).min() > -1e-12
    mixed = eval_matrix_poly(parse_polynomial("2*C1*C2^* - 1/2*I"), fam)
    assert np.allclose(mixed, 2 * c1 @ c2.T - 0.5 * np.eye(6))
    e = eval_matrix_poly(parse_polynomial("E2^*"), fam)
    assert np.allclose(e, np.sqrt(5 / 6) * (c2 - (-0.2) * np.eye(6)).T)
    with pytest.raises(DomainError):
        eval_matrix_poly(parse_polynomial("C3"), fam)
    with pytest.raises(DomainError):
        eval_matrix_poly(parse_polynomial("C1"), fam, Regime.CENTERED_E)


def test_trace_moments():
    assert trace_moments(np.eye(4), 3) == [1.0, 1.0, 1.0]
    assert trace_moments(np.zeros((3, 3)), 2) == [0.0, 0.0]
    assert trace_moments(np.diag([1.0, 2.0]), 2)[1] == 2.5
    with pytest.raises(DomainError):
        trace_moments(np.ones((2, 3)), 2)


def test_spectrum_kinds():
    assert np.allclose(spectrum(np.eye(3)).values, [1, 1, 1])
    assert np.allclose(spectrum(np.diag([3.0, 4.0]), SpectrumKind.SINGULAR).values, [3, 4])
    ev = spectrum(np.array([[0.0, 1.0], [-1.0, 0.0]]), SpectrumKind.COMPLEX_EIGS).values
    assert np.allclose(ev, [-1j, 1j])
    with pytest.raises(DomainError):
        spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))
    # tiny asymmetry is symmetrised rather than rejected
    m = np.array([[1.0, 2.0], [2.0 + 1e-14, 1.0]])
    assert np.allclose(spectrum(m).values, [-1, 3])
    with pytest.raises(EigenSolverError, match="finite=False"):
        spectrum(np.array([[np.nan, 0.0], [0.0, 1.0]]), SpectrumKind.COMPLEX_EIGS)


def test_esd_moments():
    assert esd_moments(SpectralSample(SpectrumKind.REAL_EIGS, np.ones(4)), 3) == [1.0, 1.0, 1.0]
    assert esd_moments(SpectralSample(SpectrumKind.REAL_EIGS, np.array([-1.0, 1.0])), 4) == [0.0, 1.0, 0.0, 1.0]
    rng = np.random.default_rng(0)
    a = rng.standard_normal((50, 50))
    s = a + a.T
    np.testing.assert_allclose(esd_moments(spectrum(s), 6), trace_moments(s, 6), rtol=1e-8)
    with pytest.raises(DomainError):
        esd_moments(SpectralSample(SpectrumKind.SINGULAR, np.ones(2)), 2)


def test_singular_values_match_gram_eigenvalues():
    fam = sample_family(EnsembleConfig(40, {1: (60, 0.3)}, seed=5))
    c = fam.c[1]
    sv = spectrum(c, SpectrumKind.SINGULAR).values
    eig = spectrum(c @ c.T).values
    np.testing.assert_allclose(sv, np.sqrt(np.clip(eig, 0, None)), rtol=1e-8, atol=1e-12)


def test_moment_estimate():
    est = MomentEstimate.from_values([1.0, 2.0, 3.0])
    assert est.mean == 2.0 and est.replicates == 3
    assert est.std_error == pytest.approx(1 / np.sqrt(3))
    assert MomentEstimate.from_values([4.0]).std_error == 0.0


def test_determinism_across_workers():
    cfg = EnsembleConfig(30, {1: (40, 0.4), 2: (20, -0.3)}, seed=11, replicates=6)
    stat = lambda fam: trace_moments(eval_matrix_poly(parse_polynomial("C1*C2^* + C2*C1^*"), fam), 3)
    a = monte_carlo(cfg, stat, workers=1)
    b = monte_carlo(cfg, stat, workers=3)
    assert a.tobytes() == b.tobytes()
    f1, f2 = sample_family(cfg, 2, keep_data=True), sample_family(cfg, 2, keep_data=True)
    assert all(np.array_equal(f1.data[l][i], f2.data[l][i]) for l in (1, 2) for i in (0, 1))
    assert not np.array_equal(sample_family(cfg, 3).c[1], f1.c[1])


def test_limits_reach_worker_threads():
    cfg = EnsembleConfig(10, {1: (10, 0.0)}, replicates=2)
    with limits(entries_max=250):
        with pytest.raises(ResourceLimitError):
            monte_carlo(cfg, lambda fam: [0.0], workers=2)


def test_empirical_functional():
    fam = sample_family(EnsembleConfig(8, {1: (9, 0.2)}, seed=2))
    phi = empirical_functional(fam)
    assert phi(StarWord()) == 1
    assert phi("1 1*") == pytest.approx(np.trace(fam.c[1] @ fam.c[1].T) / 8)


def test_mean_of_trace_is_rho():
    cfg = EnsembleConfig(400, {1: (800, 0.5)}, seed=21, replicates=20)
    assert within(monte_carlo_word_moment(cfg, StarWord("1")), 0.5)


def test_word_moments_match_engine():
    cfg = EnsembleConfig(200, {1: (400, 0.5), 2: (300, -0.4)}, seed=22, replicates=20)
    params = FamilyParams({1: (F(1, 2), F(1, 2)), 2: (F(-2, 5), F(2, 3))})
    words = [StarWord(w) for w in ("1 1*", "1 2*", "1 1", "2* 1 2")]
    for w, est in zip(words, monte_carlo_word_moments(cfg, words)):
        assert within(est, cc_family_moment(w, params), 10 / 200)


def test_finite_second_moment_exact():
    # E p^-1 Tr(C C^T) = 1/n + (p - 1)/n + rho^2 (Gaussian entries: E x^2 y^2 = 1 + 2 rho^2)
    p, n, rho = 50, 60, 0.6
    cfg = EnsembleConfig(p, {1: (n, rho)}, seed=23, replicates=40)
    exact = ((1 + 2 * rho**2) + (n - 1) * rho**2 + (p - 1)) / n
    assert within(monte_carlo_word_moment(cfg, StarWord("1 1*")), exact)


@pytest.mark.slow
def test_rho_one_esd_approaches_mp():
    cfg = EnsembleConfig(400, {1: (800, 1.0)}, seed=24, replicates=30)
    ests = monte_carlo_poly_moments(cfg, parse_polynomial("C1"), 4)
    for k, est in enumerate(ests, 1):
        assert within(est, mp_moment(k, F(1, 2)), 10 / 400)
