"""Cut loci, cut times, separating sets and distance-squared gradient flows
for submanifolds of model Riemannian manifolds."""

from .manifolds import (
    ManifoldId,
    ManifoldPoint,
    TangentVector,
    exp_map,
    inner,
    parse_manifold,
    point,
    riem_distance,
    tangent,
)
from .submanifolds import (
    Ellipse,
    EquatorSphere,
    FermatLift,
    FinitePoints,
    HopfLink,
    MinimizerSet,
    OrthogonalGroup,
    SpecialOrthogonal,
    Submanifold,
    UpUqSubgroup,
    parse_submanifold,
)
from .cutengine import (
    CutSample,
    FlowState,
    cut_time,
    gradient_check,
    morse_bott_flow,
    onesided_derivative_probe,
    push_to_cut,
    retract_to_n,
    sample_cut_locus,
    separating_test,
    shoot,
)
from .equivariant import (
    GroupAction,
    QuotientPoint,
    equivariance_check,
    fermat_verify,
    parse_action,
    quotient_dist,
)

__all__ = [
    "ManifoldId", "ManifoldPoint", "TangentVector", "exp_map", "inner",
    "parse_manifold", "point", "riem_distance", "tangent",
    "Ellipse", "EquatorSphere", "FermatLift", "FinitePoints", "HopfLink",
    "MinimizerSet", "OrthogonalGroup", "SpecialOrthogonal", "Submanifold",
    "UpUqSubgroup", "parse_submanifold",
    "CutSample", "FlowState", "cut_time", "gradient_check", "morse_bott_flow",
    "onesided_derivative_probe", "push_to_cut", "retract_to_n",
    "sample_cut_locus", "separating_test", "shoot",
    "GroupAction", "QuotientPoint", "equivariance_check", "fermat_verify",
    "parse_action", "quotient_dist",
]

__version__ = "0.1.0"
