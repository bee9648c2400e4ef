"""Simulation laboratory for bifractional Brownian motion.

Exact path sampling for fBm/bifBm plus a Monte Carlo harness that verifies
maximal-inequality comparisons against scaled fractional Brownian motions.
"""

from .errors import (
    BifbmlabError,
    ConfigError,
    DomainError,
    FactorizationFailed,
    NotPositiveSemidefinite,
    PreconditionViolated,
)
from .grids import TimeGrid
from .kernels import (
    Comparison,
    GramMatrix,
    KernelParams,
    ProcessKind,
    bifbm_cov,
    comparison_scale,
    fbm_cov,
    gram_matrix,
    increment_bounds,
    increment_variance,
    kernel_cov,
    psd_check,
    variance_domination,
)
from .sampling import (
    CHUNK_PATHS,
    LowerFactor,
    PathBatch,
    ProcessLabel,
    SeedInfo,
    cholesky_factor,
    embedding_eigenvalues,
    sample_fbm_circulant,
    sample_paths,
)
from .pathio import read_paths, write_paths
from .streams import StreamSeed, derive_stream, fold_label
from .harness import (
    CHECKS,
    CheckResult,
    ResultKind,
    SweepConfig,
    Verdict,
    check_drift_comparison,
    check_exponential_concentration,
    check_floor_and_tails,
    check_increment_convex,
    check_reflection_symmetry,
    check_scaling,
    check_sup_sandwich,
    increment_domination_holds,
    one_sided_verdict,
    two_point_sandwich,
)
from .config import RunConfig, load_config
from .estimators import (
    Base,
    DriftSpec,
    FunctionalDescriptor,
    MCEstimate,
    PathStats,
    Transform,
    TransformKind,
    apply_functional,
    functional_values,
    integrated_tail,
    integrated_tail_quadrature,
    mc_estimate,
    path_functionals,
    tail_curve,
)

__version__ = "0.1.0"

__all__ = [
    "BifbmlabError",
    "ConfigError",
    "DomainError",
    "FactorizationFailed",
    "NotPositiveSemidefinite",
    "PreconditionViolated",
    "TimeGrid",
    "Comparison",
    "GramMatrix",
    "KernelParams",
    "ProcessKind",
    "bifbm_cov",
    "comparison_scale",
    "fbm_cov",
    "gram_matrix",
    "increment_bounds",
    "increment_variance",
    "kernel_cov",
    "psd_check",
    "variance_domination",
    "CHUNK_PATHS",
    "LowerFactor",
    "PathBatch",
    "ProcessLabel",
    "SeedInfo",
    "cholesky_factor",
    "embedding_eigenvalues",
    "sample_fbm_circulant",
    "sample_paths",
    "read_paths",
    "write_paths",
    "StreamSeed",
    "derive_stream",
    "fold_label",
    "CHECKS",
    "CheckResult",
    "ResultKind",
    "SweepConfig",
    "Verdict",
    "check_drift_comparison",
    "check_exponential_concentration",
    "check_floor_and_tails",
    "check_increment_convex",
    "check_reflection_symmetry",
    "check_scaling",
    "check_sup_sandwich",
    "increment_domination_holds",
    "one_sided_verdict",
    "two_point_sandwich",
    "RunConfig",
    "load_config",
    "Base",
    "DriftSpec",
    "FunctionalDescriptor",
    "MCEstimate",
    "PathStats",
    "Transform",
    "TransformKind",
    "apply_functional",
    "functional_values",
    "integrated_tail",
    "integrated_tail_quadrature",
    "mc_estimate",
    "path_functionals",
    "tail_curve",
    "__version__",
]
