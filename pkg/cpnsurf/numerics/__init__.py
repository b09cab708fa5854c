"""Exact Wirtinger calculus, path integration and sphere quadrature."""

from .fields import (
    EXCLUSION_RADIUS,
    FieldExpr,
    FieldVector,
    Singularity,
    SingularityRegistry,
    d,
    dbar,
    evaluate,
    fd_check,
    lambdify_xi,
    parse_field,
    swap,
)
from .quadrature import (
    Path,
    QuadratureResult,
    disk_quadrature,
    integrate_form,
    map_points,
    sphere_quadrature,
    wirtinger_fd,
)
from .rational import XI, XIB, RationalFn, parse_coefficient, polynomial

__all__ = [
    "EXCLUSION_RADIUS",
    "XI",
    "XIB",
    "FieldExpr",
    "FieldVector",
    "Path",
    "QuadratureResult",
    "RationalFn",
    "Singularity",
    "SingularityRegistry",
    "d",
    "dbar",
    "disk_quadrature",
    "evaluate",
    "fd_check",
    "integrate_form",
    "lambdify_xi",
    "map_points",
    "parse_coefficient",
    "parse_field",
    "polynomial",
    "sphere_quadrature",
    "swap",
    "wirtinger_fd",
]
