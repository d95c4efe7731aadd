"""Closed-form product-sphere energies and one-parameter orbit families.

The product of round spheres ``S^{n_1}(t_1) x ... x S^{n_p}(t_p)`` in
``S^{n+p-1}`` has

    S     = sum n_i (t_i^-2 - 1)
    |H|^2 = (1/n^2) sum n_i^2 t_i^-2 - 1

so its Willmore energy is

    f(t) = C * prod t_i^{n_i} * [sum n_i (n - n_i) / n * t_i^-2]^{n/2}

with ``C = prod vol(S^{n_i}(1))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .representations import (
    DomainError,
    Representation,
    build_so3_conjugation_rep,
    build_so5_adjoint_rep,
    build_so_block_rep,
    so5_basis,
    so5_to_coords,
    sym_to_coords,
)

FAMILY_IDS = ("product-spheres", "veronese", "so5-adjoint", "product-line")


def _dims(dims) -> list[int]:
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise DomainError(f"dims must be positive integers, got {dims}")
    return dims


def _positive_t(dims, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape != (len(dims),):
        raise DomainError(f"expected {len(dims)} radii, got shape {t.shape}")
    if not np.all(t > 0):
        raise DomainError(
            "all t_i must be positive; a zero radius lies on a boundary stratum"
        )
    return t / np.linalg.norm(t)


def unit_sphere_volume(k: int) -> float:
    """Volume of the round unit sphere S^k."""
    return 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def product_sphere_constant(dims) -> float:
    return math.prod(unit_sphere_volume(d) for d in _dims(dims))


def product_sphere_S(dims, t) -> float:
    dims = np.array(_dims(dims))
    t = _positive_t(dims, t)
    return float(np.sum(dims * (t**-2 - 1)))


def product_sphere_H2(dims, t) -> float:
    dims = np.array(_dims(dims))
    t = _positive_t(dims, t)
    n = dims.sum()
    return float(np.sum(dims**2 * t**-2) / n**2 - 1)


def product_sphere_W(dims, t) -> float:
    """Exact Willmore energy of the product-sphere orbit with radii ``t``.

    ``t`` is normalised to the unit sphere first, so the function is
    homogeneous of degree 0.
    """
    dims = _dims(dims)
    t = _positive_t(dims, t)
    d = np.array(dims, dtype=float)
    n = d.sum()
    bracket = np.sum(d * (n - d) / n * t**-2)
    return float(product_sphere_constant(dims) * np.prod(t**d) * bracket ** (n / 2))


def product_sphere_gradient(dims, t) -> np.ndarray:
    """Gradient of log f, projected onto the tangent space of sum t_i^2 = 1."""
    dims = _dims(dims)
    t = _positive_t(dims, t)
    d = np.array(dims, dtype=float)
    n = d.sum()
    a = d * (n - d) / n
    bracket = np.sum(a * t**-2)
    g = d / t - n * a * t**-3 / bracket
    return g - np.dot(g, t) * t


def product_sphere_critical(dims) -> np.ndarray:
    """The unique interior critical radii, t_i = sqrt((n - n_i) / (n (p - 1)))."""
    dims = _dims(dims)
    p = len(dims)
    if p == 1:
        raise DomainError("single orbit; trivially Willmore")
    d = np.array(dims, dtype=float)
    n = d.sum()
    t = np.sqrt((n - d) / (n * (p - 1)))
    assert abs(np.sum(t**2) - 1) < 1e-12
    return t


def product_sphere_point(dims, t) -> np.ndarray:
    """Unit vector with (t_i, 0, ..., 0) in block i.

    Its orbit under ``build_so_block_rep(dims)`` is the product of spheres
    of radii ``t``. Zero radii are allowed (boundary strata).
    """
    dims = _dims(dims)
    t = np.asarray(t, dtype=float)
    if t.shape != (len(dims),):
        raise DomainError(f"expected {len(dims)} radii, got shape {t.shape}")
    if np.any(t < 0) or abs(np.sum(t**2) - 1) > 1e-12:
        raise DomainError("radii must be nonnegative with sum t_i^2 = 1")
    x = np.zeros(sum(dims) + len(dims))
    offsets = np.cumsum([0] + [k + 1 for k in dims[:-1]])
    x[offsets] = t
    return x


@dataclass(frozen=True)
class OrbitFamily:
    """A curve of unit vectors sweeping the orbit space of one stratum."""

    family_id: str
    rep: Representation
    curve: Callable[[float], np.ndarray]
    domain: tuple[float, float]
    interior: tuple[float, float]
    interior_fingerprint: tuple[int, int]
    boundary_labels: dict = field(default_factory=dict)
    dims: tuple[int, ...] | None = None

    def point(self, s: float) -> np.ndarray:
        lo, hi = self.domain
        if not lo <= s <= hi:
            raise DomainError(
                f"parameter {s!r} outside [{lo:.17g}, {hi:.17g}] for {self.family_id}"
            )
        return self.curve(s)

    @property
    def interior_length(self) -> float:
        return self.interior[1] - self.interior[0]

    def describe(self) -> dict:
        out = {
            "family": self.family_id,
            "rep": self.rep.name,
            "domain": list(self.domain),
            "interior": list(self.interior),
            "interior_fingerprint": list(self.interior_fingerprint),
            "boundary_labels": dict(self.boundary_labels),
        }
        if self.dims is not None:
            out["dims"] = list(self.dims)
        return out


VERONESE_EDGE = 1 / math.sqrt(6)


def _veronese_curve(s: float) -> np.ndarray:
    # diag(l1, s, l3) with trace 0 and Tr(A^2) = 1; max() guards rounding at the edge
    root = math.sqrt(max(2 - 3 * s * s, 0.0))
    l1 = (-s - root) / 2
    l3 = (-s + root) / 2
    return sym_to_coords(np.diag([l1, s, l3]))


def veronese_family() -> OrbitFamily:
    """SO(3)-conjugation orbits parametrised by the middle eigenvalue."""
    return OrbitFamily(
        family_id="veronese",
        rep=build_so3_conjugation_rep(),
        curve=_veronese_curve,
        domain=(-VERONESE_EDGE, VERONESE_EDGE),
        interior=(-VERONESE_EDGE, VERONESE_EDGE),
        interior_fingerprint=(3, 0),
        boundary_labels={
            "lo": "Veronese surface, eigenvalues (-2,1,1)/sqrt6, fingerprint (2,1)",
            "hi": "Veronese surface, eigenvalues (-1,-1,2)/sqrt6, fingerprint (2,1)",
        },
    )


_SO5 = so5_basis()
_CARTAN_1 = so5_to_coords(_SO5[0])  # rotation in the (1,2) plane
_CARTAN_2 = so5_to_coords(_SO5[7])  # rotation in the (3,4) plane


def _so5_curve(theta: float) -> np.ndarray:
    return math.cos(theta) * _CARTAN_1 + math.sin(theta) * _CARTAN_2


def so5_family() -> OrbitFamily:
    """Adjoint SO(5) orbits through a Weyl-chamber arc of the Cartan circle."""
    return OrbitFamily(
        family_id="so5-adjoint",
        rep=build_so5_adjoint_rep(),
        curve=_so5_curve,
        domain=(0.0, math.pi / 4),
        interior=(0.0, math.pi / 4),
        interior_fingerprint=(8, 2),
        boundary_labels={
            "lo": "oriented Grassmannian SO(5)/SO(2)SO(3), fingerprint (6,4)",
            "hi": "CP^3 = SO(5)/U(2), fingerprint (6,4)",
        },
    )


def product_sphere_line_family(dims) -> OrbitFamily:
    """Two-factor product spheres with radii (t, sqrt(1 - t^2))."""
    dims = _dims(dims)
    if len(dims) != 2:
        raise DomainError(f"product-line family needs exactly two factors, got {dims}")
    n1, n2 = dims

    def curve(t: float) -> np.ndarray:
        return product_sphere_point(dims, (t, math.sqrt(max(1 - t * t, 0.0))))

    return OrbitFamily(
        family_id="product-line",
        rep=build_so_block_rep(dims),
        curve=curve,
        domain=(0.0, 1.0),
        interior=(0.0, 1.0),
        interior_fingerprint=(n1 + n2, n1 * (n1 - 1) // 2 + n2 * (n2 - 1) // 2),
        boundary_labels={
            "lo": f"first factor collapses: S^{n2}, fingerprint ({n2}, {n1 * (n1 + 1) // 2 + n2 * (n2 - 1) // 2})",
            "hi": f"second factor collapses: S^{n1}, fingerprint ({n1}, {n1 * (n1 - 1) // 2 + n2 * (n2 + 1) // 2})",
        },
        dims=tuple(dims),
    )


def get_family(family_id: str, dims=None) -> OrbitFamily:
    """Look up a one-parameter family by id."""
    if family_id == "veronese":
        return veronese_family()
    if family_id == "so5-adjoint":
        return so5_family()
    if family_id in ("product-line", "product-spheres"):
        if dims is None:
            raise DomainError(f"family {family_id!r} requires dims")
        return product_sphere_line_family(dims)
    raise DomainError(f"unknown family {family_id!r}; choose from {', '.join(FAMILY_IDS)}")
