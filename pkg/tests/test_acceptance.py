"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import math
import subprocess
import sys
import time

import numpy as np

from willmore_orbits.critical import collapse_exponent, corollary_scan, find_critical_1d, optimize_simplex
from willmore_orbits.families import (
    product_sphere_W,
    product_sphere_gradient,
    product_sphere_line_family,
    so5_family,
    veronese_family,
)
from willmore_orbits.geometry import (
    orbit_invariants,
    scale_invariance_check,
    second_fundamental_form,
    stratum_fingerprint,
    tangent_map,
)
from willmore_orbits.oracles import (
    fd_log_gradient,
    fd_second_fundamental_form,
    group_motion,
    random_principal_points,
)
from willmore_orbits.verify import builtin_representations


def test_1_willmore_torus(record):
    start = time.perf_counter()
    counts, worst = [], 0.0
    for n1, n2 in [(1, 1), (1, 2), (2, 3), (3, 4)]:
        crit = find_critical_1d(product_sphere_line_family([n1, n2]))
        counts.append(len(crit))
        if crit:
            worst = max(worst, abs(crit[0].param - math.sqrt(n2 / (n1 + n2))))
    elapsed = time.perf_counter() - start
    ok = counts == [1, 1, 1, 1] and worst <= 1e-8 and elapsed < 5
    record(1, ok, f"Willmore torus: counts {counts}, max |dt| {worst:.1e}, {elapsed:.2f}s")
    assert ok


def test_2_simplex_closed_form(record):
    start = time.perf_counter()
    worst_t, worst_g = 0.0, 0.0
    for dims in [(1, 1), (2, 3), (1, 1, 1), (1, 2, 3), (2, 2, 2, 2)]:
        n, p = sum(dims), len(dims)
        expected = np.sqrt([(n - k) / (n * (p - 1)) for k in dims])
        cp = optimize_simplex(dims, init="barycenter")
        worst_t = max(worst_t, float(np.max(np.abs(cp.param - expected))))
        worst_g = max(worst_g, cp.grad_norm)
    elapsed = time.perf_counter() - start
    ok = worst_t <= 1e-7 and worst_g <= 1e-10 and elapsed < 10
    record(2, ok, f"simplex optimum: max |dt| {worst_t:.1e}, max |grad| {worst_g:.1e}, {elapsed:.2f}s")
    assert ok


def test_3_clifford_energy(record):
    w = product_sphere_W([1, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)])
    rel = abs(w - 4 * math.pi**2) / (4 * math.pi**2)
    ok = rel <= 1e-12
    record(3, ok, f"Clifford torus W = {w:.15g}, rel err {rel:.1e}")
    assert ok


def test_4_closed_form_consistency(record):
    dims = [1, 2]
    n = sum(dims)
    fam = product_sphere_line_family(dims)
    ratios, worst = [], 0.0
    for t1 in np.linspace(0.02, 0.98, 33):
        t = np.array([t1, math.sqrt(1 - t1**2)])
        inv = orbit_invariants(fam.rep, fam.point(t1))
        ratios.append(product_sphere_W(dims, t) / inv.relW)
        s_exact = sum(k * (ti**-2 - 1) for k, ti in zip(dims, t))
        h2_exact = sum(k * k * ti**-2 for k, ti in zip(dims, t)) / n**2 - 1
        worst = max(worst, abs(inv.S - s_exact) / s_exact, abs(inv.H2 - h2_exact) / h2_exact)
    cv = float(np.std(ratios) / np.mean(ratios))
    ok = cv <= 1e-7 and worst <= 1e-9
    record(4, ok, f"W/relW CV {cv:.1e}, S/H2 rel err {worst:.1e}")
    assert ok


def test_5_veronese(record):
    fam = veronese_family()
    crit = find_critical_1d(fam)
    s_star = min((abs(c.param) for c in crit), default=math.inf)
    ends = [orbit_invariants(fam.rep, fam.point(s)) for s in fam.domain]
    prints = [e.fingerprint for e in ends]
    h2 = max(e.H2 for e in ends)
    ok = s_star <= 1e-6 and prints == [(2, 1), (2, 1)] and h2 <= 1e-8
    record(5, ok, f"Veronese |s*| {s_star:.1e}, endpoint fingerprints {prints}, max H2 {h2:.1e}")
    assert ok


def test_6_so5_adjoint(record):
    start = time.perf_counter()
    fam = so5_family()
    ends = [stratum_fingerprint(fam.rep, fam.point(s)) for s in fam.domain]
    lo, hi = fam.interior
    inner = {stratum_fingerprint(fam.rep, fam.point(s)) for s in np.linspace(lo, hi, 33)[1:-1]}
    report = corollary_scan(fam)
    elapsed = time.perf_counter() - start
    ok = ends == [(6, 4), (6, 4)] and inner == {(8, 2)} and report.count_min >= 1 and elapsed < 30
    record(6, ok, f"SO(5) ends {ends}, interior {sorted(inner)}, count_min {report.count_min}, {elapsed:.2f}s")
    assert ok


def test_7_collapse_divergence(record):
    parts, ok = [], True
    cases = [
        (product_sphere_line_family([1, 1]), "lo", -1.0, 0.05),
        (product_sphere_line_family([2, 3]), "lo", -3.0, 0.1),
        (veronese_family(), "lo", None, None),
        (veronese_family(), "hi", None, None),
        (so5_family(), "lo", None, None),
        (so5_family(), "hi", None, None),
    ]
    for fam, side, rate, tol in cases:
        fit = collapse_exponent(fam, side)
        good = fit.r2 >= 0.999 and (fit.exponent < 0 if rate is None else abs(fit.exponent - rate) <= tol)
        ok &= good
        parts.append(f"{fam.family_id}:{side} {fit.exponent:.3f}")
    record(7, ok, "collapse exponents " + ", ".join(parts))
    assert ok


def test_8_invariant_suites(record):
    rng = np.random.default_rng(2024)
    reps = builtin_representations()
    sff = ginv = scale = grad = 0.0
    fields = ("S", "H2", "integrand", "vol_proxy", "relW")
    for rep in reps:
        for i, x in enumerate(random_principal_points(rep, 50, rng)):
            td = tangent_map(rep, x)
            diff = second_fundamental_form(rep, x).components - fd_second_fundamental_form(rep, x, td=td)
            sff = max(sff, float(np.max(np.abs(diff))))
            if i < 10:
                a = rng.normal(size=rep.g_dim)
                y = group_motion(rep, a / np.linalg.norm(a), rng.uniform(-0.5, 0.5), x)
                p, q = orbit_invariants(rep, x), orbit_invariants(rep, y)
                assert p.fingerprint == q.fingerprint
                for f in fields:
                    u, v = getattr(p, f), getattr(q, f)
                    ginv = max(ginv, abs(u - v) / max(1.0, abs(u)))
            if i < 5:
                for c in (0.3, 4.0, 10.0):
                    scale = max(scale, scale_invariance_check(rep, x, c))
    for dims in [(1, 1), (1, 2), (2, 3), (1, 1, 1), (2, 1, 3)]:
        for _ in range(10):
            t = rng.uniform(0.2, 1.0, size=len(dims))
            t /= np.linalg.norm(t)
            g = product_sphere_gradient(dims, t) - fd_log_gradient(dims, t)
            grad = max(grad, float(np.max(np.abs(g))))
    ok = sff <= 1e-6 and ginv <= 1e-8 and scale <= 1e-8 and grad <= 1e-6
    record(
        8, ok,
        f"SFF-vs-FD {sff:.1e}, G-invariance {ginv:.1e}, scale {scale:.1e}, gradient-vs-FD {grad:.1e}",
    )
    assert ok


def test_9_full_verify_runtime(record):
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "willmore_orbits", "verify"], capture_output=True, text=True, timeout=150
    )
    elapsed = time.perf_counter() - start
    ok = proc.returncode == 0 and elapsed < 120
    record(9, ok, f"full verify exit {proc.returncode} in {elapsed:.2f}s")
    assert ok, proc.stdout + proc.stderr
