"""Extrinsic geometry of group orbits in round spheres.

Everything is computed from the generator fields ``x -> E_a x``:

* the tangent space of ``G.x`` is the column span of ``phi = [E_1 x, ..., E_g x]``;
* for tangent vectors ``v = sum c_a E_a x`` and ``w = sum d_b E_b x`` the
  second fundamental form is the normal part of
  ``1/2 sum c_a d_b (E_a E_b + E_b E_a) x`` (the antisymmetric part is a
  bracket field, hence tangent);
* the orbit volume equals ``C * prod(sigma_i(phi))`` with ``C`` fixed along a
  stratum, so ``integrand * prod(sigma_i)`` shares its critical points with
  the Willmore energy restricted to the orbit space of that stratum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .representations import DomainError, Representation

RANK_TOL = 1e-9
UNIT_TOL = 1e-10
CLAMP_TOL = 1e-9


class GeometryError(RuntimeError):
    """Internal consistency failure of the orbit geometry."""


@dataclass(frozen=True)
class TangentData:
    phi: np.ndarray
    singular_values: np.ndarray
    orbit_dim: int
    isotropy_dim: int
    tangent_frame: np.ndarray
    normal_frame: np.ndarray
    # algebra coefficients of the tangent frame: tangent_frame = phi @ coeffs
    coeffs: np.ndarray
    ambiguous_rank: bool = False

    @property
    def fingerprint(self) -> tuple[int, int]:
        return (self.orbit_dim, self.isotropy_dim)


@dataclass(frozen=True)
class SecondFundamentalForm:
    components: np.ndarray  # (normal, i, j)

    @property
    def orbit_dim(self) -> int:
        return self.components.shape[1]

    @property
    def S(self) -> float:
        return float(np.sum(self.components**2))

    @property
    def mean_curvature(self) -> np.ndarray:
        n = self.orbit_dim
        return np.trace(self.components, axis1=1, axis2=2) / n

    @property
    def trace_free_norm_sq(self) -> float:
        n = self.orbit_dim
        h = self.mean_curvature
        tf = self.components - h[:, None, None] * np.eye(n)
        return float(np.sum(tf**2))


@dataclass(frozen=True)
class OrbitInvariants:
    orbit_dim: int
    isotropy_dim: int
    S: float
    H2: float
    integrand: float
    vol_proxy: float
    relW: float
    ambiguous_rank: bool = False

    @property
    def fingerprint(self) -> tuple[int, int]:
        return (self.orbit_dim, self.isotropy_dim)

    def to_dict(self) -> dict:
        return {
            "orbit_dim": self.orbit_dim,
            "isotropy_dim": self.isotropy_dim,
            "S": self.S,
            "H2": self.H2,
            "integrand": self.integrand,
            "vol_proxy": self.vol_proxy,
            "relW": self.relW,
            "fingerprint": list(self.fingerprint),
            "ambiguous_rank": self.ambiguous_rank,
        }


def _as_point(rep: Representation, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (rep.ambient_dim,):
        raise DomainError(
            f"point has shape {x.shape}, expected ({rep.ambient_dim},)"
        )
    return x


def _check_unit(x: np.ndarray) -> None:
    norm = np.linalg.norm(x)
    if not abs(norm - 1.0) <= UNIT_TOL:
        raise DomainError(f"point not on unit sphere (norm {norm:.17g})")


def _tangent(rep: Representation, y: np.ndarray, rank_tol: float) -> TangentData:
    # y may have any positive norm; the orbit then lives in the sphere of radius |y|
    phi = np.einsum("aij,j->ia", rep.generators, y)
    u, sv, vt = np.linalg.svd(phi, full_matrices=True)
    smax = sv[0] if sv.size else 0.0
    if smax == 0.0:
        n = 0
        ambiguous = False
    else:
        cut = rank_tol * smax
        n = int(np.sum(sv > cut))
        ambiguous = bool(np.any((sv > 0.1 * cut) & (sv < 10 * cut)))
    tangent = u[:, :n]
    coeffs = vt[:n].T / sv[:n]

    radial = (y / np.linalg.norm(y))[:, None]
    q, _, _ = np.linalg.svd(np.hstack([tangent, radial]), full_matrices=True)
    normal = q[:, n + 1:]
    return TangentData(
        phi=phi,
        singular_values=sv,
        orbit_dim=n,
        isotropy_dim=rep.g_dim - n,
        tangent_frame=tangent,
        normal_frame=normal,
        coeffs=coeffs,
        ambiguous_rank=ambiguous,
    )


def tangent_map(rep: Representation, x, rank_tol: float = RANK_TOL) -> TangentData:
    """Tangent space of the orbit through the unit vector ``x``."""
    x = _as_point(rep, x)
    _check_unit(x)
    return _tangent(rep, x, rank_tol)


def _sff(rep: Representation, y: np.ndarray, td: TangentData) -> SecondFundamentalForm:
    if td.orbit_dim == 0:
        raise GeometryError("point is a fixed point; orbit is 0-dimensional")
    # A_i = sum_a coeffs[a, i] E_a, so that A_i y = e_i
    a = np.einsum("ai,amn->imn", td.coeffs, rep.generators)
    ay = a @ y
    aay = np.einsum("imn,jn->ijm", a, ay)
    sym = 0.5 * (aay + aay.transpose(1, 0, 2))
    return SecondFundamentalForm(np.einsum("mv,ijm->vij", td.normal_frame, sym))


def second_fundamental_form(rep: Representation, x) -> SecondFundamentalForm:
    """Second fundamental form of ``G.x`` inside the unit sphere.

    Components are taken against the frames of :func:`tangent_map`.
    """
    x = _as_point(rep, x)
    _check_unit(x)
    return _sff(rep, x, _tangent(rep, x, RANK_TOL))


def _invariants(rep: Representation, y: np.ndarray) -> OrbitInvariants:
    td = _tangent(rep, y, RANK_TOL)
    n = td.orbit_dim
    vol = float(np.prod(td.singular_values[:n]))
    if n == 0:
        return OrbitInvariants(0, td.isotropy_dim, 0.0, 0.0, 0.0, vol, 0.0, td.ambiguous_rank)

    sff = _sff(rep, y, td)
    S = sff.S
    H2 = float(np.sum(sff.mean_curvature**2))
    gap = S - n * H2
    if gap < -CLAMP_TOL * max(1.0, S):
        raise GeometryError(f"S - n|H|^2 = {gap:.3e} is negative beyond rounding")
    if n <= 1:
        integrand = 0.0
    else:
        # the trace-free norm is the same quantity without cancellation
        integrand = sff.trace_free_norm_sq ** (n / 2)
    return OrbitInvariants(
        orbit_dim=n,
        isotropy_dim=td.isotropy_dim,
        S=S,
        H2=H2,
        integrand=integrand,
        vol_proxy=vol,
        relW=integrand * vol,
        ambiguous_rank=td.ambiguous_rank,
    )


def orbit_invariants(rep: Representation, x) -> OrbitInvariants:
    x = _as_point(rep, x)
    _check_unit(x)
    return _invariants(rep, x)


def relative_willmore(rep: Representation, x) -> float:
    """Willmore energy of ``G.x`` up to a positive constant fixed on each stratum.

    Values are comparable only between points with equal
    :func:`stratum_fingerprint`.
    """
    return orbit_invariants(rep, x).relW


def stratum_fingerprint(rep: Representation, x) -> tuple[int, int]:
    return tangent_map(rep, x).fingerprint


def same_stratum(rep: Representation, x, y) -> bool:
    """Whether relative Willmore values at ``x`` and ``y`` may be compared."""
    return stratum_fingerprint(rep, x) == stratum_fingerprint(rep, y)


def scale_invariance_check(rep: Representation, x, c: float) -> float:
    """|relW on the sphere of radius sqrt(c)  -  relW on the unit sphere|.

    Scaling the ambient metric by ``c`` is realised by evaluating the orbit
    of ``sqrt(c) * x``, which lies in the sphere of radius ``sqrt(c)``.
    """
    if not c > 0:
        raise DomainError(f"scale factor must be positive, got {c}")
    x = _as_point(rep, x)
    _check_unit(x)
    unit = _invariants(rep, x)
    scaled = _invariants(rep, np.sqrt(c) * x)
    return abs(scaled.relW - unit.relW)
