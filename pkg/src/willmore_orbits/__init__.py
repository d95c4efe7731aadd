"""Willmore energy of Lie group orbits in round spheres."""

from .critical import (
    CollapseFit,
    CriticalPoint,
    collapse_exponent,
    corollary_scan,
    find_critical_1d,
    optimize_simplex,
    scan_1d,
)
from .families import (
    OrbitFamily,
    product_sphere_W,
    product_sphere_critical,
    product_sphere_gradient,
    product_sphere_line_family,
    product_sphere_point,
    so5_family,
    veronese_family,
)
from .geometry import (
    OrbitInvariants,
    orbit_invariants,
    relative_willmore,
    scale_invariance_check,
    second_fundamental_form,
    stratum_fingerprint,
    tangent_map,
)
from .representations import (
    DomainError,
    Representation,
    build_so3_conjugation_rep,
    build_so5_adjoint_rep,
    build_so_block_rep,
    validate_representation,
)

__version__ = "0.1.0"
