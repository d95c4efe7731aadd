"""End-to-end verification suite behind ``willmore verify``.

Each check returns ``(passed, detail)``; :func:`run_checks` times them and
prints one line per check.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import critical, families, geometry, oracles
from .representations import (
    Representation,
    build_so3_conjugation_rep,
    build_so5_adjoint_rep,
    build_so_block_rep,
    validate_representation,
)

TOTAL_BUDGET_S = 120.0


def builtin_representations() -> list[Representation]:
    return [
        build_so_block_rep([1, 1]),
        build_so_block_rep([1, 2]),
        build_so_block_rep([2, 3]),
        build_so_block_rep([1, 1, 1]),
        build_so3_conjugation_rep(),
        build_so5_adjoint_rep(),
    ]


@dataclass
class Check:
    name: str
    group: str
    fn: Callable[[], tuple[bool, str]]


@dataclass
class CheckResult:
    name: str
    group: str
    passed: bool
    detail: str
    seconds: float


CHECKS: list[Check] = []


def check(name: str, group: str):
    def register(fn):
        CHECKS.append(Check(name, group, fn))
        return fn

    return register


@check("representations", "representations")
def _representations():
    bad = []
    for rep in builtin_representations():
        report = validate_representation(rep)
        if not report.passed:
            bad.append(f"{rep.name}: {','.join(report.failures)}")
    so5 = validate_representation(build_so5_adjoint_rep())
    if so5.closure_residual > 1e-12:
        bad.append(f"so5 closure {so5.closure_residual:.2e}")
    return not bad, "; ".join(bad) or "all builtin actions valid"


@check("willmore-torus", "product-spheres")
def _willmore_torus():
    start = time.perf_counter()
    worst = 0.0
    for n1, n2 in [(1, 1), (1, 2), (2, 3), (3, 4)]:
        crit = critical.find_critical_1d(families.product_sphere_line_family([n1, n2]))
        if len(crit) != 1:
            return False, f"({n1},{n2}): {len(crit)} critical points"
        worst = max(worst, abs(crit[0].param - math.sqrt(n2 / (n1 + n2))))
    elapsed = time.perf_counter() - start
    return worst <= 1e-8 and elapsed < 5, f"max |dt| = {worst:.2e}, {elapsed:.2f}s"


@check("simplex-optimum", "product-spheres")
def _simplex():
    start = time.perf_counter()
    worst_t, worst_g = 0.0, 0.0
    for dims in [(1, 1), (2, 3), (1, 1, 1), (1, 2, 3), (2, 2, 2, 2)]:
        cp = critical.optimize_simplex(dims)
        worst_t = max(worst_t, float(np.max(np.abs(cp.param - families.product_sphere_critical(dims)))))
        worst_g = max(worst_g, cp.grad_norm)
    elapsed = time.perf_counter() - start
    ok = worst_t <= 1e-7 and worst_g <= 1e-10 and elapsed < 10
    return ok, f"max |dt| = {worst_t:.2e}, max |grad| = {worst_g:.2e}, {elapsed:.2f}s"


@check("clifford-energy", "product-spheres")
def _clifford():
    w = families.product_sphere_W([1, 1], [1 / math.sqrt(2)] * 2)
    rel = abs(w - 4 * math.pi**2) / (4 * math.pi**2)
    return rel <= 1e-12, f"W = {w:.15g}, rel err {rel:.1e}"


@check("closed-form-consistency", "product-spheres")
def _consistency():
    dims = [1, 2]
    fam = families.product_sphere_line_family(dims)
    ratios, worst = [], 0.0
    for row in critical.scan_1d(fam, steps=33):
        t = np.array([row.param, math.sqrt(1 - row.param**2)])
        inv = geometry.orbit_invariants(fam.rep, fam.point(row.param))
        ratios.append(families.product_sphere_W(dims, t) / inv.relW)
        for got, want in [
            (inv.S, families.product_sphere_S(dims, t)),
            (inv.H2, families.product_sphere_H2(dims, t)),
        ]:
            worst = max(worst, abs(got - want) / abs(want))
    cv = float(np.std(ratios) / np.mean(ratios))
    return cv <= 1e-7 and worst <= 1e-9, f"ratio CV {cv:.1e}, S/H2 rel err {worst:.1e}"


@check("veronese", "veronese")
def _veronese():
    fam = families.veronese_family()
    crit = critical.find_critical_1d(fam)
    if not crit:
        return False, "no critical point"
    s_star = min((c.param for c in crit), key=abs)
    prints, h2 = [], []
    for s in fam.domain:
        inv = geometry.orbit_invariants(fam.rep, fam.point(s))
        prints.append(inv.fingerprint)
        h2.append(inv.H2)
    ok = abs(s_star) <= 1e-6 and all(p == (2, 1) for p in prints) and max(h2) <= 1e-8
    return ok, f"s* = {s_star:.1e}, endpoint fingerprints {prints}, max H2 {max(h2):.1e}"


@check("so5-adjoint", "so5-adjoint")
def _so5():
    start = time.perf_counter()
    fam = families.so5_family()
    ends = [geometry.stratum_fingerprint(fam.rep, fam.point(s)) for s in fam.domain]
    inner = {(r.orbit_dim, r.isotropy_dim) for r in critical.scan_1d(fam)}
    report = critical.corollary_scan(fam)
    elapsed = time.perf_counter() - start
    ok = (
        ends == [(6, 4), (6, 4)]
        and inner == {(8, 2)}
        and report.count_min >= 1
        and elapsed < 30
    )
    where = ", ".join(f"{c.param:.10f} ({c.kind})" for c in report.critical_points)
    return ok, f"ends {ends}, interior {sorted(inner)}, critical at {where}, {elapsed:.2f}s"


@check("collapse", "collapse")
def _collapse():
    parts, ok = [], True
    cases = [
        (families.product_sphere_line_family([1, 1]), "lo", -1.0, 0.05),
        (families.product_sphere_line_family([2, 3]), "lo", -3.0, 0.1),
        (families.veronese_family(), "lo", None, None),
        (families.veronese_family(), "hi", None, None),
        (families.so5_family(), "lo", None, None),
        (families.so5_family(), "hi", None, None),
    ]
    for fam, side, want, tol in cases:
        fit = critical.collapse_exponent(fam, side)
        good = fit.accepted and (want is None or abs(fit.exponent - want) <= tol)
        ok &= good
        parts.append(f"{fam.family_id}{list(fam.dims or [])}:{side} {fit.exponent:.4f} (r2 {fit.r2:.6f})")
    return ok, "; ".join(parts)


@check("sff-vs-fd", "invariants")
def _sff_fd():
    rng = np.random.default_rng(0)
    worst = 0.0
    for rep in builtin_representations():
        for x in oracles.random_principal_points(rep, 50, rng):
            td = geometry.tangent_map(rep, x)
            alg = geometry.second_fundamental_form(rep, x).components
            fd = oracles.fd_second_fundamental_form(rep, x, td=td)
            worst = max(worst, float(np.max(np.abs(alg - fd))))
    return worst <= 1e-6, f"max |alg - fd| = {worst:.1e}"


@check("g-invariance", "invariants")
def _g_invariance():
    rng = np.random.default_rng(1)
    worst = 0.0
    fields = ("S", "H2", "integrand", "vol_proxy", "relW")
    for rep in builtin_representations():
        for x in oracles.random_principal_points(rep, 10, rng):
            a = rng.normal(size=rep.g_dim)
            y = oracles.group_motion(rep, a / np.linalg.norm(a), rng.uniform(-0.3, 0.3), x)
            p, q = geometry.orbit_invariants(rep, x), geometry.orbit_invariants(rep, y)
            if p.fingerprint != q.fingerprint:
                return False, f"fingerprint changed along a group motion in {rep.name}"
            for f in fields:
                u, v = getattr(p, f), getattr(q, f)
                worst = max(worst, abs(u - v) / max(1.0, abs(u)))
    return worst <= 1e-8, f"max scaled deviation {worst:.1e}"


@check("scale-invariance", "invariants")
def _scale():
    rng = np.random.default_rng(2)
    worst = 0.0
    for rep in builtin_representations():
        for x in oracles.random_principal_points(rep, 5, rng):
            for c in (0.3, 4.0, 10.0):
                worst = max(worst, geometry.scale_invariance_check(rep, x, c))
    return worst <= 1e-8, f"max residual {worst:.1e}"


@check("gradient-vs-fd", "invariants")
def _gradient_fd():
    rng = np.random.default_rng(3)
    worst = 0.0
    for dims in [(1, 1), (2, 3), (1, 1, 1), (1, 2, 3), (3, 1)]:
        for _ in range(10):
            t = rng.uniform(0.2, 1.0, size=len(dims))
            t /= np.linalg.norm(t)
            diff = families.product_sphere_gradient(dims, t) - oracles.fd_log_gradient(dims, t)
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst <= 1e-6, f"max component error {worst:.1e}"


def custom_rep_check(rep: Representation) -> Check:
    def fn():
        report = validate_representation(rep)
        return report.passed, (
            f"{rep.name}: skew {report.skew_residual:.1e}, closure {report.closure_residual:.1e}, "
            f"min sv {report.min_singular_value:.1e}"
            + (f", failed: {','.join(report.failures)}" if report.failures else "")
        )

    return Check(f"custom-rep:{rep.name}", "representations", fn)


def select(only: list[str] | None) -> list[Check]:
    if not only:
        return list(CHECKS)
    wanted = set(only)
    known = {c.name for c in CHECKS} | {c.group for c in CHECKS}
    unknown = wanted - known
    if unknown:
        raise ValueError(f"unknown check or group: {', '.join(sorted(unknown))}")
    return [c for c in CHECKS if c.name in wanted or c.group in wanted]


def run_checks(
    only: list[str] | None = None,
    rep: Representation | None = None,
    out=None,
) -> tuple[bool, list[CheckResult]]:
    out = out or sys.stdout
    checks = select(only)
    if rep is not None:
        checks.append(custom_rep_check(rep))
    results = []
    start = time.perf_counter()
    for c in checks:
        t0 = time.perf_counter()
        try:
            passed, detail = c.fn()
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(c.name, c.group, bool(passed), detail, time.perf_counter() - t0)
        results.append(res)
        print(
            f"{'PASS' if res.passed else 'FAIL'}  {res.name:<26} {res.seconds:7.2f}s  {res.detail}",
            file=out,
        )
    total = time.perf_counter() - start
    if not only:
        res = CheckResult("total-runtime", "runtime", total < TOTAL_BUDGET_S, f"{total:.2f}s", total)
        results.append(res)
        print(f"{'PASS' if res.passed else 'FAIL'}  {res.name:<26} {total:7.2f}s  budget {TOTAL_BUDGET_S:.0f}s", file=out)
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed", file=out)
    return ok, results
