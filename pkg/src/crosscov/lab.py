"""Finite-size ensembles: correlated data matrices, sample cross-covariance
matrices, matrix polynomials, normalised trace moments, spectra and
replicate-based Monte Carlo estimates.

Seeding: replicate ``r`` and family label ``l`` draw from
``PCG64(SeedSequence(seed, spawn_key=(r, l)))``, so every replicate owns an
independent, reproducible stream regardless of how replicates are scheduled.
"""
from __future__ import annotations

import contextvars
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .cumulants import MomentFunctional, StarWord
from .errors import DomainError, EigenSolverError, ResourceLimitError, current_limits
from .polynomial import NCPolynomial

__all__ = [
    "Dist",
    "Regime",
    "SpectrumKind",
    "EnsembleConfig",
    "MatrixFamily",
    "SpectralSample",
    "MomentEstimate",
    "replicate_rng",
    "sample_pair",
    "cross_covariance",
    "centered_scaled",
    "sample_family",
    "eval_matrix_poly",
    "word_product",
    "trace_moments",
    "spectrum",
    "esd_moments",
    "empirical_functional",
    "monte_carlo",
    "monte_carlo_word_moment",
    "monte_carlo_word_moments",
    "monte_carlo_poly_moments",
]


class Dist(enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"


class Regime(enum.Enum):
    RAW_C = "raw_c"
    CENTERED_E = "centered_e"


class SpectrumKind(enum.Enum):
    REAL_EIGS = "real_eigs"
    SINGULAR = "singular"
    COMPLEX_EIGS = "complex_eigs"


@dataclass(frozen=True)
class EnsembleConfig:
    """``families`` maps label -> ``(n_l, rho_l)``."""

    p: int
    families: Mapping[int, tuple[int, float]]
    dist: Dist = Dist.GAUSSIAN
    seed: int = 0
    replicates: int = 1

    def __post_init__(self):
        if self.p < 1:
            raise DomainError(f"p must be >= 1, got {self.p}")
        if not self.families:
            raise DomainError("at least one family is required")
        fams = {}
        for label, (n, rho) in sorted(self.families.items()):
            if int(label) < 1:
                raise DomainError(f"labels start at 1, got {label}")
            if int(n) < 1:
                raise DomainError(f"n_{label} must be >= 1, got {n}")
            if not abs(float(rho)) <= 1:
                raise DomainError(f"|rho_{label}| = {abs(float(rho))} > 1")
            fams[int(label)] = (int(n), float(rho))
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "dist", Dist(self.dist))
        if self.replicates < 1:
            raise DomainError(f"replicates must be >= 1, got {self.replicates}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(self.families)

    def n(self, label: int) -> int:
        return self.families[label][0]

    def rho(self, label: int) -> float:
        return self.families[label][1]


def replicate_rng(seed: int, replicate: int, label: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replicate, label))))


def _check_resources(p: int, n: int, count: int = 2) -> None:
    cap = current_limits().entries_max
    if p * n * count > cap:
        raise ResourceLimitError(f"{count} matrices of size {p}x{n} exceed entries_max={cap}")


def sample_pair(p: int, n: int, rho: float, dist: Dist, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Entry pairs i.i.d., mean 0, variance 1, ``E[X_ij Y_ij] = rho``."""
    if not abs(rho) <= 1:
        raise DomainError(f"|rho| = {abs(rho)} > 1")
    _check_resources(p, n)
    dist = Dist(dist)
    if dist is Dist.GAUSSIAN:
        x = rng.standard_normal((p, n))
        if rho == 1:
            return x, x.copy()
        z = rng.standard_normal((p, n))
        return x, rho * x + math.sqrt(1.0 - rho * rho) * z
    x = rng.integers(0, 2, size=(p, n), dtype=np.int8).astype(np.float64) * 2.0 - 1.0
    flip = rng.random((p, n)) < (1.0 - rho) / 2.0
    return x, np.where(flip, -x, x)


def cross_covariance(x: np.ndarray, y: np.ndarray, n: Optional[int] = None) -> np.ndarray:
    """``C = X Y^T / n``."""
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape != y.shape:
        raise DomainError(f"shape mismatch {x.shape} vs {y.shape}")
    n = x.shape[1] if n is None else n
    return (x @ y.T) / n


def centered_scaled(c: np.ndarray, rho: float, n: int, p: int) -> np.ndarray:
    """``E = sqrt(n/p) (C - rho I)``."""
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (p, p):
        raise DomainError(f"expected a {p}x{p} matrix, got {c.shape}")
    return math.sqrt(n / p) * (c - rho * np.eye(p))


@dataclass
class MatrixFamily:
    """The matrices of one replicate.  ``data`` (X_l, Y_l) is kept only on request."""

    p: int
    c: dict[int, np.ndarray]
    e: dict[int, np.ndarray] = field(default_factory=dict)
    data: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    def matrix(self, label: int, star: bool, regime: Regime) -> np.ndarray:
        store = self.c if Regime(regime) is Regime.RAW_C else self.e
        try:
            m = store[label]
        except KeyError:
            raise DomainError(f"label {label} not in this family") from None
        return m.T if star else m


def sample_family(cfg: EnsembleConfig, replicate: int = 0, keep_data: bool = False) -> MatrixFamily:
    c, e, data = {}, {}, {}
    for label, (n, rho) in cfg.families.items():
        x, y = sample_pair(cfg.p, n, rho, cfg.dist, replicate_rng(cfg.seed, replicate, label))
        c[label] = cross_covariance(x, y, n)
        e[label] = centered_scaled(c[label], rho, n, cfg.p)
        if keep_data:
            data[label] = (x, y)
    return MatrixFamily(cfg.p, c, e, data)


def _regime_for(poly: NCPolynomial, regime: Optional[Regime]) -> Regime:
    implied = Regime.RAW_C if poly.symbol == "C" else Regime.CENTERED_E
    if regime is None:
        return implied
    regime = Regime(regime)
    if poly.labels and regime is not implied:
        raise DomainError(f"{poly.symbol}-polynomial cannot be evaluated in regime {regime.name}")
    return regime


def word_product(w: StarWord, fam: MatrixFamily, regime: Regime) -> np.ndarray:
    w = StarWord(w)
    if not w:
        return np.eye(fam.p)
    out = fam.matrix(w[0].label, w[0].star, regime)
    for l in w[1:]:
        out = out @ fam.matrix(l.label, l.star, regime)
    return np.array(out)


def eval_matrix_poly(poly: NCPolynomial, fam: MatrixFamily, regime: Optional[Regime] = None) -> np.ndarray:
    """Substitute C_l (or E_l) for the letters, transposes for starred letters."""
    regime = _regime_for(poly, regime)
    out = np.zeros((fam.p, fam.p))
    for w, coef in poly.terms.items():
        out += float(coef) * word_product(w, fam, regime)
    return out


def trace_moments(m: np.ndarray, max_order: int) -> list[float]:
    """``[p^-1 Tr(M^k) for k = 1..max_order]`` by repeated multiplication."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"square matrix required, got {m.shape}")
    if max_order < 1:
        raise DomainError("max_order must be >= 1")
    p = m.shape[0]
    out, power = [], m
    for k in range(1, max_order + 1):
        if k > 1:
            power = power @ m
        out.append(float(np.trace(power)) / p)
    return out


@dataclass(frozen=True)
class SpectralSample:
    kind: SpectrumKind
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def _solver_error(m: np.ndarray, exc: Exception) -> EigenSolverError:
    finite = bool(np.isfinite(m).all())
    norm = float(np.linalg.norm(m)) if finite else float("nan")
    return EigenSolverError(f"eigensolver failed on {m.shape} matrix (finite={finite}, frobenius={norm:.6g}): {exc}")


def spectrum(m: np.ndarray, kind: SpectrumKind = SpectrumKind.REAL_EIGS) -> SpectralSample:
    m = np.asarray(m, dtype=np.float64)
    kind = SpectrumKind(kind)
    if m.ndim != 2 or (kind is not SpectrumKind.SINGULAR and m.shape[0] != m.shape[1]):
        raise DomainError(f"unsupported shape {m.shape} for {kind.name}")
    try:
        if kind is SpectrumKind.REAL_EIGS:
            asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
            if asym > 1e-10 * max(float(np.linalg.norm(m)), 1e-300):
                raise DomainError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
            vals = np.linalg.eigvalsh((m + m.T) / 2.0)
        elif kind is SpectrumKind.SINGULAR:
            vals = np.sort(np.linalg.svd(m, compute_uv=False))
        else:
            ev = np.linalg.eigvals(m)
            vals = ev[np.lexsort((ev.imag, ev.real))]
    except np.linalg.LinAlgError as exc:
        raise _solver_error(m, exc) from exc
    return SpectralSample(kind, vals)


def esd_moments(sample: SpectralSample, max_order: int) -> list[float]:
    """``mean(lambda_i^k)`` for ``k = 1..max_order``."""
    if sample.kind is not SpectrumKind.REAL_EIGS:
        raise DomainError("esd_moments needs real eigenvalues")
    v = np.asarray(sample.values, dtype=np.float64)
    return [float(np.mean(v**k)) for k in range(1, max_order + 1)]


def empirical_functional(fam: MatrixFamily, regime: Regime = Regime.RAW_C) -> MomentFunctional:
    """``w -> p^-1 Tr(word)`` on one replicate (float values)."""
    return MomentFunctional(lambda w: float(np.trace(word_product(w, fam, regime))) / fam.p, "empirical")


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    std_error: float
    replicates: int

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "MomentEstimate":
        v = np.asarray(values, dtype=np.float64)
        se = float(np.std(v, ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
        return cls(float(np.mean(v)), se, len(v))


def monte_carlo(
    cfg: EnsembleConfig,
    statistic: Callable[[MatrixFamily], Sequence[float]],
    workers: int = 1,
    keep_data: bool = False,
) -> np.ndarray:
    """Evaluate ``statistic`` on every replicate; rows in replicate order."""
    largest = max(n for n, _ in cfg.families.values())
    _check_resources(cfg.p, largest, 2 * max(1, workers))

    def one(r: int):
        return np.asarray(statistic(sample_family(cfg, r, keep_data)), dtype=np.float64)

    if workers <= 1:
        rows = [one(r) for r in range(cfg.replicates)]
    else:
        # worker threads do not inherit context variables (evaluation limits)
        contexts = [contextvars.copy_context() for _ in range(cfg.replicates)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda r: contexts[r].run(one, r), range(cfg.replicates)))
    return np.vstack(rows)


def _summaries(rows: np.ndarray) -> list[MomentEstimate]:
    return [MomentEstimate.from_values(rows[:, j]) for j in range(rows.shape[1])]


def monte_carlo_word_moments(
    cfg: EnsembleConfig, words: Sequence[StarWord], regime: Regime = Regime.RAW_C, workers: int = 1
) -> list[MomentEstimate]:
    words = [StarWord(w) for w in words]

    def stat(fam: MatrixFamily):
        return [np.trace(word_product(w, fam, regime)) / fam.p for w in words]

    return _summaries(monte_carlo(cfg, stat, workers))


def monte_carlo_word_moment(
    cfg: EnsembleConfig, w: StarWord, regime: Regime = Regime.RAW_C, workers: int = 1
) -> MomentEstimate:
    """Replicate summary of ``p^-1 Tr`` of the word's matrix product."""
    return monte_carlo_word_moments(cfg, [w], regime, workers)[0]


def monte_carlo_poly_moments(
    cfg: EnsembleConfig,
    poly: NCPolynomial,
    max_order: int,
    regime: Optional[Regime] = None,
    workers: int = 1,
) -> list[MomentEstimate]:
    """Summaries of ``p^-1 Tr(poly^k)`` for ``k = 1..max_order``."""
    regime = _regime_for(poly, regime)
    return _summaries(
        monte_carlo(cfg, lambda fam: trace_moments(eval_matrix_poly(poly, fam, regime), max_order), workers)
    )
