"""Exact free-probability limits of sample cross-covariance matrices and a
Monte Carlo laboratory to check them at finite size."""
from .errors import (
    DivergentLimitError,
    DomainError,
    EigenSolverError,
    Limits,
    PolynomialParseError,
    ResourceLimitError,
    SizeLimitError,
    current_limits,
    limits,
)
from .kernels import BACKEND
from .partitions import (
    NCPartition,
    SetPartition,
    catalan,
    enumerate_nc,
    enumerate_nc_pair,
    is_noncrossing,
    is_pair_partition,
    kreweras_complement,
    leq,
    mobius_nc,
    one_partition,
    zero_partition,
)
from .cumulants import (
    PLAIN,
    STAR,
    CumulantFunctional,
    FamilyParams,
    Letter,
    MomentFunctional,
    StarWord,
    cc_cumulant,
    cc_family_moment,
    cc_family_moment_generic,
    cc_free_cumulants,
    cc_moments,
    cumulants_from_moments,
    elliptic_cumulant,
    elliptic_family_moment,
    elliptic_free_cumulants,
    elliptic_moments,
    is_free_check,
    kappa_pi,
    moments_from_cumulants,
    phi_pi,
    s_statistic,
    t_block_statistic,
)
from .laws import (
    LawKind,
    LawSpec,
    MomentSequence,
    c_plus_cstar_cumulant,
    cc_star_law_moment_rho0,
    cc_star_moment_rho0,
    compound_poisson_moment,
    mp_moment,
    mp_moment_narayana,
    prod_alt_cumulant,
    prod_alt_cumulant_free_product,
    sym_mp_cumulant,
)
from .polynomial import (
    NCPolynomial,
    Surd,
    centered_scaled_limit,
    is_symmetric,
    parse_polynomial,
    poly_adjoint,
    poly_cumulant,
    poly_moment,
    poly_mul,
)

__version__ = "0.1.0"
