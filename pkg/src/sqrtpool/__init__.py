"""Minimum-information pooling of expert priors in square-root density space."""
from .densities import (
    Beta,
    Density,
    Exponential,
    Gamma,
    LogNormal,
    Normal,
    Panel,
    Tabulated,
    density_from_dict,
    eval_pdf,
    eval_sqrt,
    eval_sqrt_deriv,
)
from .errors import (
    BoundaryPoint,
    Cancelled,
    DegenerateDirection,
    DegenerateGram,
    DisjointSupports,
    InfiniteInformation,
    InvalidDensity,
    InvalidPanel,
    InvalidRange,
    PoolingError,
    QuadratureFailure,
    SingularTransform,
)
from .kernels import GramPair, Provenance, a_entry, b_entry, gram, read_gram, write_gram
from .oracle import SearchConfig, fisher_direct, search_alpha, search_alpha_nonneg
from .pooling import PooledPrior, dominant_component, eval_pooled, pool, sample_curve
from .quadrature import QuadratureConfig, quad_inner
from .solver import PoolingSolution, RankReduction, basis_transform, min_rayleigh, rayleigh, reduce_rank

__version__ = "0.1.0"
