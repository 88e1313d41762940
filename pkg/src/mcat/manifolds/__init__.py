from .base import (
    AxiomReport,
    Manifold,
    TOL_DOMAIN,
    TOL_MEMBERSHIP,
    TOL_TANGENT,
    check_retraction_axioms,
    retraction_distance,
    round_trip_residual,
)
from .grassmann import Grassmann, TOL_RANK, canonicalize, subspace_distance
from .sphere import Sphere

__all__ = [
    "AxiomReport",
    "Grassmann",
    "Manifold",
    "Sphere",
    "TOL_DOMAIN",
    "TOL_MEMBERSHIP",
    "TOL_RANK",
    "TOL_TANGENT",
    "canonicalize",
    "check_retraction_axioms",
    "retraction_distance",
    "round_trip_residual",
    "subspace_distance",
]
