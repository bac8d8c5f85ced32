"""Substructured two-level and multilevel Schwarz solvers on 2D rectangles.

The solvers iterate on interface traces only: each smoother application
hides one exact solve per subdomain, and the coarse correction acts on a
low-dimensional interface space (explicit basis vectors, a randomized
sketch, or a coarsened interface grid).  A dense spectral lab verifies the
closed-form contraction factors and the equivalences between the interface,
augmented and volumetric formulations at desk scale.
"""

from .coarse import (
    CoarseOperator,
    CoarseSpace,
    TransferPair,
    build_coarse_operator,
    build_eigen_space,
    build_fourier_space,
    build_geometric_transfer,
    build_pca_space,
    interpolation_matrix,
    load_coarse_space,
    save_coarse_space,
    sine_basis,
)
from .core import (
    IterationHistory,
    SubstructuredOperator,
    build_operator,
    dense_smoother,
    dense_system,
    norm_2inf,
    psm_iterate,
)
from .decomposition import (
    DecompositionSpec,
    SubdomainSolver,
    build_decomposition,
    centered_decomposition,
)
from .exceptions import (
    CoarseOperatorRankError,
    ConfigurationError,
    DegenerateCoarseSpaceError,
    DivergenceError,
    SizeCapError,
    SubschwarzError,
    ValidationError,
)
from .model_problem import (
    ADVECTION_CATALOG,
    RHS_CATALOG,
    ChannelBox,
    GridSpec,
    ProblemSpec,
    VolumeSystem,
    assemble_volume,
    make_grid,
    manufactured_solution,
)
from .solvers import (
    MultilevelHierarchy,
    TwoLevelConfig,
    build_hierarchy,
    gmls_solve,
    gmls_vcycle,
    s2s_b1_solve,
    s2s_b2_solve,
    setup_two_level,
    two_level_solve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
