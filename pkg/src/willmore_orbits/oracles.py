"""Finite-difference oracles, independent of the algebraic engine.

Only used for verification: the second fundamental form is recovered from
second derivatives of one-parameter subgroup curves ``s -> exp(sA) x``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

from .families import product_sphere_W
from .geometry import TangentData, tangent_map
from .representations import Representation


def group_motion(rep: Representation, coeffs, s: float, x) -> np.ndarray:
    """exp(s * sum_a coeffs[a] E_a) applied to ``x``."""
    a = np.einsum("a,amn->mn", np.asarray(coeffs, dtype=float), rep.generators)
    return expm(s * a) @ np.asarray(x, dtype=float)


def _curve_accel(rep, coeffs, x, h):
    return (group_motion(rep, coeffs, h, x) - 2 * x + group_motion(rep, coeffs, -h, x)) / h**2


def fd_second_fundamental_form(
    rep: Representation, x, step: float = 1e-4, td: TangentData | None = None
) -> np.ndarray:
    """Components (normal, i, j) in the frames of ``tangent_map(rep, x)``.

    Diagonal terms come from central second differences of subgroup curves
    through ``x``; off-diagonal terms from polarization.
    """
    x = np.asarray(x, dtype=float)
    td = td or tangent_map(rep, x)
    n = td.orbit_dim
    # algebra coefficients reproducing each tangent frame vector
    coeffs, *_ = np.linalg.lstsq(td.phi, td.tangent_frame, rcond=None)
    nu = td.normal_frame

    diag = [nu.T @ _curve_accel(rep, coeffs[:, i], x, step) for i in range(n)]
    out = np.zeros((nu.shape[1], n, n))
    for i in range(n):
        out[:, i, i] = diag[i]
        for j in range(i):
            both = nu.T @ _curve_accel(rep, coeffs[:, i] + coeffs[:, j], x, step)
            out[:, i, j] = out[:, j, i] = 0.5 * (both - diag[i] - diag[j])
    return out


def fd_log_gradient(dims, t, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of log product_sphere_W at ``t``.

    The energy is homogeneous of degree 0, so at a unit ``t`` this equals the
    gradient projected onto the constraint sphere.
    """
    t = np.asarray(t, dtype=float)
    g = np.zeros_like(t)
    for i in range(len(t)):
        e = np.zeros_like(t)
        e[i] = step
        g[i] = (math.log(product_sphere_W(dims, t + e)) - math.log(product_sphere_W(dims, t - e))) / (2 * step)
    return g


def random_principal_points(
    rep: Representation, count: int, rng: np.random.Generator, min_ratio: float = 0.2
) -> list[np.ndarray]:
    """Uniform unit vectors whose orbit tangent map has sigma_min/sigma_max >= min_ratio.

    Keeps the sample away from collapsing orbits, where the fixed-step
    oracle's truncation error (of order step^2 / radius^3) dominates.
    """
    out = []
    while len(out) < count:
        x = rng.normal(size=rep.ambient_dim)
        x /= np.linalg.norm(x)
        td = tangent_map(rep, x)
        sv = td.singular_values[: td.orbit_dim]
        if td.orbit_dim and sv[-1] >= min_ratio * sv[0]:
            out.append(x)
    return out
