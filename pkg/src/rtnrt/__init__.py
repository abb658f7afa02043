"""Range test and no-response test for a sound-soft obstacle in the unit disk."""

from ._backend import BACKEND
from .errors import (
    ConfigError,
    ConsistencyError,
    DegenerateOperatorError,
    DomainError,
    GeometryError,
    MetricError,
    ParameterError,
    PlanError,
    RtnrtError,
    SingularEvaluationError,
    SolverError,
    SpaceError,
)
from .forward import (
    CauchyData,
    HarmonicFieldRep,
    concentric_annulus_oracle,
    evaluate_w_extension,
    solve_annular_dirichlet,
    solve_interior_dirichlet,
)
from .geometry import (
    BoundaryCurve,
    TestDomain,
    check_distance_property,
    contains,
    make_circle,
    make_convex_polygon,
    make_ellipse,
)
from .indicators import (
    IndicatorResult,
    RegularizationPath,
    Schedule,
    classify_path,
    duality_gap,
    green_identity_check,
    nrt_indicator,
    nrt_pre_indicator,
    rt_indicator,
    rt_path,
    rt_variant_indicator,
    taylor_growth_diagnostic,
)
from .kernels import (
    KernelEval,
    directional_derivative_green,
    dirichlet_green_disk,
    fundamental_solution,
    normal_derivative_green_on_boundary,
)
from .operators import (
    DiscreteOperator,
    InnerProductSpace,
    SingularSystem,
    assemble_adjoint,
    assemble_R,
    assemble_R_dual,
    assemble_single_layer,
    assemble_W,
    make_space,
    singular_system,
    tikhonov_solve,
    w_fit_residual,
)
from .reconstruction import (
    ReconstructionMask,
    SweepPlan,
    hausdorff_distance,
    intersect_positive,
    polygon_mode_sweep,
    sweep,
)

__version__ = "0.1.0"
