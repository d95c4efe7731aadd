"""Locating Willmore orbits along orbit families.

Critical points of the Willmore energy restricted to a stratum's orbit
space are the Willmore orbits; along a one-parameter family they are the
zeros of d/ds relW(curve(s)). The search works with the logarithmic
derivative, which has the same zeros but is independent of the (unknown)
stratum constant.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .families import (
    OrbitFamily,
    product_sphere_W,
    product_sphere_gradient,
)
from .geometry import orbit_invariants, relative_willmore
from .representations import DomainError

log = logging.getLogger(__name__)

DEDUP_RADIUS = 1e-6
FD_REL_STEP = 1e-5


class NumericalError(RuntimeError):
    """A non-finite or otherwise unusable numerical value."""


def thread_count() -> int:
    """Worker count from WILLMORE_THREADS (0 = one per CPU, unset = 1)."""
    raw = os.environ.get("WILLMORE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"WILLMORE_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise DomainError("WILLMORE_THREADS must be >= 0")
    return n or os.cpu_count() or 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map, threaded when WILLMORE_THREADS allows it."""
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class CriticalPoint:
    param: float | np.ndarray
    value: float
    kind: str  # "min", "max" or "saddle/inflection"
    grad_norm: float
    second_deriv: float

    def to_dict(self) -> dict:
        param = self.param.tolist() if isinstance(self.param, np.ndarray) else self.param
        return {
            "param": param,
            "value": self.value,
            "kind": self.kind,
            "grad_norm": self.grad_norm,
            "second_deriv": self.second_deriv,
        }


@dataclass
class ScanRow:
    param: float
    value: float
    orbit_dim: int
    isotropy_dim: int


@dataclass
class CollapseFit:
    boundary: str
    exponent: float
    r2: float
    samples: list[tuple[float, float]]
    accepted: bool
    diverges: bool

    def to_dict(self) -> dict:
        return {
            "boundary": self.boundary,
            "exponent": self.exponent,
            "r2": self.r2,
            "accepted": self.accepted,
            "diverges": self.diverges,
            "no_divergence": not self.diverges,
            "samples": [list(s) for s in self.samples],
        }


def _objective(family: OrbitFamily, objective=None) -> Callable[[float], float]:
    if objective is None:
        rep = family.rep
        return lambda s: relative_willmore(rep, family.point(s))
    return lambda s: objective(family.point(s))


def _grid(family: OrbitFamily, steps: int, margin: float) -> np.ndarray:
    if steps < 8:
        raise DomainError(f"steps must be >= 8, got {steps}")
    if not 0 < margin < 0.2:
        raise DomainError(f"margin must lie in (0, 0.2), got {margin}")
    lo, hi = family.interior
    if not hi > lo:
        raise DomainError(f"family {family.family_id} has an empty interior")
    pad = margin * (hi - lo)
    return np.linspace(lo + pad, hi - pad, steps)


def scan_1d(family: OrbitFamily, steps: int = 65, margin: float = 0.02) -> list[ScanRow]:
    """relW and fingerprint on a uniform grid over the shrunken interior."""
    grid = _grid(family, steps, margin)

    def row(s):
        inv = orbit_invariants(family.rep, family.point(float(s)))
        return ScanRow(float(s), inv.relW, inv.orbit_dim, inv.isotropy_dim)

    return parallel_map(row, list(grid))


def _log_value(f: Callable[[float], float], s: float) -> float:
    v = f(s)
    if not (math.isfinite(v) and v > 0):
        raise NumericalError(f"non-finite or non-positive value {v!r} at parameter {s!r}")
    return math.log(v)


def find_critical_1d(
    family: OrbitFamily,
    grad_tol: float = 1e-8,
    max_iter: int = 200,
    steps: int = 129,
    margin: float = 0.02,
    objective: Callable[[np.ndarray], float] | None = None,
) -> list[CriticalPoint]:
    """Critical points of relW along ``family`` by bracketing and bisection.

    ``grad_norm`` is |d/ds log relW|. ``objective`` replaces relW (it receives
    the curve point) and exists so that stratum constants can be checked to
    be irrelevant.
    """
    if not grad_tol > 0:
        raise DomainError("grad_tol must be positive")
    f = _objective(family, objective)
    h = max(FD_REL_STEP, FD_REL_STEP * (family.domain[1] - family.domain[0]))

    def deriv(s: float) -> float:
        return (_log_value(f, s + h) - _log_value(f, s - h)) / (2 * h)

    def second(s: float) -> float:
        return (_log_value(f, s + h) - 2 * _log_value(f, s) + _log_value(f, s - h)) / h**2

    grid = _grid(family, steps, margin)
    d = parallel_map(deriv, [float(s) for s in grid])

    roots = []
    for k in range(len(grid) - 1):
        a, b = float(grid[k]), float(grid[k + 1])
        da, db = d[k], d[k + 1]
        if da == 0.0:
            roots.append(a)
            continue
        if da * db > 0:
            continue
        for _ in range(max_iter):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            dm = deriv(mid)
            if dm == 0.0:
                a = b = mid
                break
            if (dm > 0) == (da > 0):
                a, da = mid, dm
            else:
                b, db = mid, dm
            if b - a <= 1e-14 * (family.domain[1] - family.domain[0]):
                break
        roots.append(a if abs(da) <= abs(db) else b)
    if d[-1] == 0.0:
        roots.append(float(grid[-1]))

    found: list[CriticalPoint] = []
    for r in sorted(roots):
        if found and abs(r - found[-1].param) < DEDUP_RADIUS:
            continue
        g = abs(deriv(r))
        if g > grad_tol:
            # sign change across a jump, not a zero of the derivative
            log.info("discarding bracket at %.17g: residual %.3e > %.3e", r, g, grad_tol)
            continue
        f2 = second(r)
        if abs(f2) < 10 * grad_tol / h:
            kind = "saddle/inflection"
        else:
            kind = "min" if f2 > 0 else "max"
        found.append(CriticalPoint(r, float(f(r)), kind, g, f2))
    return found


def optimize_simplex(
    dims,
    init="barycenter",
    tol: float = 1e-10,
    max_iter: int = 20000,
    objective: Callable[[np.ndarray], float] | None = None,
    gradient: Callable[[np.ndarray], np.ndarray] | None = None,
) -> CriticalPoint:
    """Projected gradient descent of log f on {sum t_i^2 = 1, t_i > 0}.

    By default ``f`` is the product-sphere energy; ``objective``/``gradient``
    substitute another log-objective and its projected gradient.
    """
    dims = [int(k) for k in dims]
    if len(dims) < 2:
        raise DomainError("optimisation needs at least two factors")
    logf = objective or (lambda t: math.log(product_sphere_W(dims, t)))
    grad = gradient or (lambda t: product_sphere_gradient(dims, t))

    if isinstance(init, str):
        if init != "barycenter":
            raise DomainError(f"unknown init {init!r}")
        t = np.full(len(dims), 1 / math.sqrt(len(dims)))
    else:
        t = np.asarray(init, dtype=float)
        if t.shape != (len(dims),) or not np.all(t > 0):
            raise DomainError("init must be a positive vector with one entry per factor")
        t = t / np.linalg.norm(t)

    val = logf(t)
    g = grad(t)
    for _ in range(max_iter):
        if np.linalg.norm(g) <= tol:
            break
        step = 0.5
        while True:
            trial = t - step * g
            if np.all(trial > 0):
                trial /= np.linalg.norm(trial)
                trial_val = logf(trial)
                noise = 8 * np.finfo(float).eps * max(1.0, abs(val))
                if trial_val < val - noise:
                    break
                # inside the rounding band the value cannot rank steps; use the gradient
                if trial_val <= val + noise and np.linalg.norm(grad(trial)) < np.linalg.norm(g):
                    break
            step *= 0.5
            if step < 1e-20:
                break
        if step < 1e-20:
            break
        t, val = trial, trial_val
        if np.min(t) < 1e-6:
            raise NumericalError(
                "collapse direction; no interior critical point reachable from init"
            )
        g = grad(t)
    gnorm = float(np.linalg.norm(grad(t)))
    lam = _tangent_hessian_min_eig(logf, t)
    kind = "min" if lam > 0 else ("max" if lam < 0 else "saddle/inflection")
    return CriticalPoint(t, product_sphere_W(dims, t) if objective is None else math.exp(val),
                         kind, gnorm, lam)


def _tangent_hessian_min_eig(logf, t: np.ndarray, h: float = 1e-4) -> float:
    """Smallest eigenvalue of the FD Hessian of logf on the sphere's tangent plane."""
    p = len(t)
    # orthonormal basis of the tangent plane at t
    q, _ = np.linalg.qr(np.column_stack([t, np.eye(p)[:, : p - 1]]))
    basis = q[:, 1:]

    def at(u):
        y = t + basis @ u
        return logf(y / np.linalg.norm(y))

    m = p - 1
    hess = np.zeros((m, m))
    f0 = at(np.zeros(m))
    for i in range(m):
        ei = np.eye(m)[i] * h
        hess[i, i] = (at(ei) - 2 * f0 + at(-ei)) / h**2
        for j in range(i):
            ej = np.eye(m)[j] * h
            hess[i, j] = hess[j, i] = (
                at(ei + ej) - at(ei - ej) - at(-ei + ej) + at(-ei - ej)
            ) / (4 * h * h)
    return float(np.linalg.eigvalsh(hess)[0])


def collapse_exponent(
    family: OrbitFamily,
    boundary: str = "lo",
    decades: int = 4,
    objective: Callable[[np.ndarray], float] | None = None,
) -> CollapseFit:
    """Power-law rate of relW as the orbits collapse onto a boundary stratum.

    Samples d_k = d0 * 10^(-k/4) with d0 a tenth of the interior, and fits
    log relW against log d over the final two decades.
    """
    if decades < 2:
        raise DomainError("decades must be >= 2")
    if boundary not in ("lo", "hi"):
        raise DomainError(f"boundary must be 'lo' or 'hi', got {boundary!r}")
    f = _objective(family, objective)
    lo, hi = family.interior
    d0 = 0.1 * (hi - lo)

    samples = []
    for k in range(4 * decades + 1):
        d = d0 * 10 ** (-k / 4)
        s = lo + d if boundary == "lo" else hi - d
        try:
            v = f(s)
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            log.info("collapse sampling stopped at d=%.3e: %s", d, exc)
            break
        if not (math.isfinite(v) and v > 0):
            log.info("collapse sampling stopped at d=%.3e: value %r", d, v)
            break
        samples.append((d, v))
    if len(samples) < 8:
        raise NumericalError(
            f"only {len(samples)} usable samples near the {boundary} boundary; need 8"
        )

    tail = samples[-9:]
    x = np.log([d for d, _ in tail])
    y = np.log([v for _, v in tail])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    diverges = bool(slope < 0)
    return CollapseFit(boundary, float(slope), r2, samples, r2 >= 0.999 and diverges, diverges)


@dataclass
class CorollaryReport:
    count_min: int
    count_max: int
    critical_points: list[CriticalPoint]
    fits: dict[str, CollapseFit] = field(default_factory=dict)

    @property
    def both_diverge(self) -> bool:
        return all(f.accepted for f in self.fits.values()) and len(self.fits) == 2

    @property
    def consistent(self) -> bool:
        """An interior minimum exists whenever both ends blow up."""
        return self.count_min >= 1 or not self.both_diverge

    def to_dict(self) -> dict:
        return {
            "count_min": self.count_min,
            "count_max": self.count_max,
            "critical_points": [c.to_dict() for c in self.critical_points],
            "fits": {k: v.to_dict() for k, v in self.fits.items()},
            "both_diverge": self.both_diverge,
            "consistent": self.consistent,
        }


def corollary_scan(family: OrbitFamily, grad_tol: float = 1e-8) -> CorollaryReport:
    crit = find_critical_1d(family, grad_tol=grad_tol)
    fits = {b: collapse_exponent(family, b) for b in ("lo", "hi")}
    report = CorollaryReport(
        count_min=sum(c.kind == "min" for c in crit),
        count_max=sum(c.kind == "max" for c in crit),
        critical_points=crit,
        fits=fits,
    )
    if not report.consistent:
        log.warning(
            "%s diverges at both ends but no interior minimum was found", family.family_id
        )
    return report
