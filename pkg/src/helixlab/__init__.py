"""helixlab: Frenet apparatus and eikonal helix classification on chart metrics."""

__version__ = "0.1.0"

from .backend import backend_name, has_compiled
from .errors import (
    AxisFitFailed,
    ConfigError,
    DegenerateFrame,
    DomainError,
    EmptyGrid,
    ExprSyntaxError,
    HelixlabError,
    InvalidProfile,
    IrregularCurve,
    NonFiniteValue,
    NonMonotoneParameter,
    NonOrthonormalInitialFrame,
    NonPositiveW,
    NotSlantHelix,
    SingularMetric,
    StepTooLarge,
    TooFewSamples,
    UnknownIdentifier,
    UnknownSeries,
)
from .expr import Expr, eval_dual, evaluate, parse

from .manifold import (  # noqa: E402  (grouped re-exports)
    MetricField,
    ScalarField,
    christoffel,
    covariant_derivative_along,
    cross,
    gradient,
    hessian,
    inner,
    norm,
)
from .curves import (  # noqa: E402
    ParamCurve,
    SampledCurve,
    UnitSpeedCurve,
    arclength_reparametrize,
    curve_from_samples,
)
from .frenet import (  # noqa: E402
    CurvatureProfile,
    FrenetSample,
    FrenetSeries,
    darboux,
    frenet_apparatus,
    frenet_series,
    slant_invariant,
    unit_darboux,
)
from .analysis import (  # noqa: E402
    ClassificationReport,
    ConstancyResult,
    check_constancy,
    check_constant_precession,
    classify_darboux_helix,
    classify_non_normed_darboux,
    classify_pair,
    classify_slant_helix,
    is_affine_along,
    is_eikonal_along,
    reconstruct_axis,
    verify_corollaries_2_3_2_4,
    verify_corollary_2_2,
    verify_theorem_2_1,
    verify_theorem_2_2,
    verify_theorem_2_3,
)
from .generate import (  # noqa: E402
    FrameState,
    ProfileSpec,
    constant_precession_profile,
    example_2_1,
    integrate_frenet,
    parallel_transport,
    precession_fixture,
)

__all__ = [
    "MetricField",
    "ScalarField",
    "christoffel",
    "covariant_derivative_along",
    "cross",
    "gradient",
    "hessian",
    "inner",
    "norm",
    "ParamCurve",
    "SampledCurve",
    "UnitSpeedCurve",
    "arclength_reparametrize",
    "curve_from_samples",
    "CurvatureProfile",
    "FrenetSample",
    "FrenetSeries",
    "darboux",
    "frenet_apparatus",
    "frenet_series",
    "slant_invariant",
    "unit_darboux",
    "ClassificationReport",
    "ConstancyResult",
    "check_constancy",
    "check_constant_precession",
    "classify_darboux_helix",
    "classify_non_normed_darboux",
    "classify_pair",
    "classify_slant_helix",
    "is_affine_along",
    "is_eikonal_along",
    "reconstruct_axis",
    "verify_corollaries_2_3_2_4",
    "verify_corollary_2_2",
    "verify_theorem_2_1",
    "verify_theorem_2_2",
    "verify_theorem_2_3",
    "FrameState",
    "ProfileSpec",
    "constant_precession_profile",
    "example_2_1",
    "integrate_frenet",
    "parallel_transport",
    "precession_fixture",
    "__version__",
    "backend_name",
    "has_compiled",
    "parse",
    "evaluate",
    "eval_dual",
    "Expr",
    "HelixlabError",
    "SingularMetric",
    "NonFiniteValue",
    "DegenerateFrame",
    "IrregularCurve",
    "TooFewSamples",
    "NonMonotoneParameter",
    "EmptyGrid",
    "NotSlantHelix",
    "NonPositiveW",
    "NonOrthonormalInitialFrame",
    "StepTooLarge",
    "AxisFitFailed",
    "InvalidProfile",
    "ExprSyntaxError",
    "UnknownIdentifier",
    "DomainError",
    "ConfigError",
    "UnknownSeries",
]
