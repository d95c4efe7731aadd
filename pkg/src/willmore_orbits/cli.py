"""Command-line front end.

Exit codes: 0 success, 1 numerical or check failure, 2 usage/validation error.
Errors are reported as a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import critical, families, geometry, verify
from .critical import NumericalError
from .geometry import GeometryError
from .representations import (
    DomainError,
    Representation,
    build_so_block_rep,
    load_representation,
    validate_representation,
)

SCAN_HEADER = ["param", "value", "orbit_dim", "isotropy_dim"]


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(_jsonable(obj), indent=2) + "\n", out)


def _parse_floats(raw: str, what: str) -> list[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of numbers, got {raw!r}")


def _parse_dims(raw: str | None) -> list[int] | None:
    if raw is None:
        return None
    try:
        return [int(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--dims must be comma-separated integers, got {raw!r}")


def _load_rep(path: str) -> Representation:
    try:
        return load_representation(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read representation {path}: {exc}")


def _checked_rep(path: str) -> Representation:
    rep = _load_rep(path)
    report = validate_representation(rep)
    if not report.passed:
        raise UsageError(f"representation {rep.name} failed validation: {', '.join(report.failures)}")
    return rep


def _load_point(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            return np.array(json.load(fh)["point"], dtype=float)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read point file {path}: {exc}")


def _family(args) -> families.OrbitFamily:
    if args.family is None:
        raise UsageError("--family is required")
    return families.get_family(args.family, _parse_dims(args.dims))


def _rep_and_point(args) -> tuple[Representation, np.ndarray, dict]:
    """Resolve (rep, point) from either --rep/--point or a family option set."""
    if args.rep:
        if not args.point:
            raise UsageError("--rep requires --point")
        return _checked_rep(args.rep), _load_point(args.point), {}
    if args.family == "product-spheres":
        dims = _parse_dims(args.dims)
        if dims is None or args.t is None:
            raise UsageError("product-spheres needs --dims and --t")
        t = np.array(_parse_floats(args.t, "--t"))
        if len(t) != len(dims):
            raise UsageError(f"--t has {len(t)} entries but --dims has {len(dims)}")
        if np.any(t <= 0):
            raise UsageError("--t entries must be positive")
        t = t / np.linalg.norm(t)
        extra = {"t": t, "W": families.product_sphere_W(dims, t)}
        return build_so_block_rep(dims), families.product_sphere_point(dims, t), extra
    fam = _family(args)
    if args.param is None:
        raise UsageError(f"family {args.family} needs --param")
    return fam.rep, fam.point(args.param), {"param": args.param}


def cmd_eval(args) -> int:
    rep, x, extra = _rep_and_point(args)
    inv = geometry.orbit_invariants(rep, x)
    out = {"rep": rep.name, **extra, **inv.to_dict()}
    if inv.orbit_dim <= 1:
        out["note"] = "orbit of dimension <= 1: Willmore functional is constant, counted as Willmore"
    _emit_json(out, args.out)
    return 0


def cmd_fingerprint(args) -> int:
    rep, x, extra = _rep_and_point(args)
    td = geometry.tangent_map(rep, x)
    _emit_json(
        {
            "rep": rep.name,
            **extra,
            "orbit_dim": td.orbit_dim,
            "isotropy_dim": td.isotropy_dim,
            "singular_values": td.singular_values,
            "ambiguous_rank": td.ambiguous_rank,
        },
        args.out,
    )
    return 0


def _scan_format(args) -> str:
    if args.format:
        return args.format
    if args.out and args.out.endswith(".json"):
        return "json"
    return "csv"


def write_scan_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for r in rows:
        w.writerow([f"{r.param:.17g}", f"{r.value:.17g}", r.orbit_dim, r.isotropy_dim])
    return buf.getvalue()


def read_scan_csv(text: str) -> list[critical.ScanRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != SCAN_HEADER:
        raise UsageError(f"unexpected scan header {header}")
    return [critical.ScanRow(float(p), float(v), int(n), int(k)) for p, v, n, k in reader]


def _curve_rows(rep: Representation, path: str) -> list[critical.ScanRow]:
    try:
        with open(path) as fh:
            data = json.load(fh)
        params = [float(p) for p in data["params"]]
        points = np.array(data["points"], dtype=float)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read curve file {path}: {exc}")
    if len(params) != len(points):
        raise UsageError("curve file needs one point per parameter")
    rows = []
    for s, x in zip(params, points):
        inv = geometry.orbit_invariants(rep, x)
        rows.append(critical.ScanRow(s, inv.relW, inv.orbit_dim, inv.isotropy_dim))
    return rows


def cmd_scan(args) -> int:
    if args.rep:
        if not args.curve:
            raise UsageError("--rep requires --curve for scans")
        rows = _curve_rows(_checked_rep(args.rep), args.curve)
    else:
        rows = critical.scan_1d(_family(args), steps=args.steps, margin=args.margin)
    if _scan_format(args) == "csv":
        _emit(write_scan_csv(rows), args.out)
    else:
        _emit_json([r.__dict__ for r in rows], args.out)
    return 0


def cmd_optimize(args) -> int:
    if args.family == "product-spheres":
        dims = _parse_dims(args.dims)
        if dims is None:
            raise UsageError("product-spheres needs --dims")
        init = "barycenter" if args.init is None else _parse_floats(args.init, "--init")
        cp = critical.optimize_simplex(dims, init=init, tol=args.tol, max_iter=args.max_iter)
        result = {"family": args.family, "dims": dims, "critical_points": [cp.to_dict()]}
    else:
        fam = _family(args)
        crit = critical.find_critical_1d(fam, grad_tol=args.tol, max_iter=args.max_iter)
        result = {**fam.describe(), "critical_points": [c.to_dict() for c in crit]}
        if fam.family_id == "so5-adjoint":
            result["note"] = "location computed numerically; no closed form is known"
    _emit_json(result, args.out)
    return 0


def cmd_collapse(args) -> int:
    fam = _family(args)
    fit = critical.collapse_exponent(fam, boundary=args.boundary, decades=args.decades)
    _emit_json({**fam.describe(), **fit.to_dict()}, args.out)
    return 0 if fit.accepted else 1


def cmd_verify(args) -> int:
    rep = _load_rep(args.rep) if args.rep else None
    only = args.only.split(",") if args.only else None
    try:
        ok, _ = verify.run_checks(only=only, rep=rep)
    except ValueError as exc:
        raise UsageError(str(exc))
    return 0 if ok else 1


def cmd_families(args) -> int:
    descs = [
        {"family": "product-spheres", "dims": "required", "note": "exact energy on the simplex"},
        families.veronese_family().describe(),
        families.so5_family().describe(),
        {**families.product_sphere_line_family([1, 1]).describe(), "dims": "required (two factors)"},
    ]
    _emit_json(descs, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="willmore", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=True):
        if family:
            p.add_argument("--family", choices=families.FAMILY_IDS)
            p.add_argument("--dims", help="comma-separated sphere dimensions, e.g. 1,2")
        p.add_argument("--out", help="output file (default: stdout)")

    def positive_int(raw):
        v = int(raw)
        if v <= 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v

    for name, fn in [("eval", cmd_eval), ("fingerprint", cmd_fingerprint)]:
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--t", help="product-spheres radii, comma-separated")
        p.add_argument("--param", type=float, help="family parameter")
        p.add_argument("--rep", help="representation JSON file")
        p.add_argument("--point", help='point JSON file {"point": [...]}')
        p.set_defaults(func=fn)

    p = sub.add_parser("scan")
    common(p)
    p.add_argument("--steps", type=positive_int, default=65)
    p.add_argument("--margin", type=float, default=0.02)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--rep", help="representation JSON file")
    p.add_argument("--curve", help='curve JSON file {"params": [...], "points": [[...], ...]}')
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize")
    common(p)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=positive_int, default=None)
    p.add_argument("--init", help="product-spheres starting radii (default: barycenter)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("collapse")
    common(p)
    p.add_argument("--boundary", choices=("lo", "hi"), default="lo")
    p.add_argument("--decades", type=positive_int, default=4)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("verify")
    p.add_argument("--only", help="comma-separated check names or groups")
    p.add_argument("--rep", help="also validate this representation JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("families")
    common(p, family=False)
    p.set_defaults(func=cmd_families)
    return parser


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": message, "kind": kind}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "optimize":
        if args.tol is None:
            args.tol = 1e-10 if args.family == "product-spheres" else 1e-8
        if args.max_iter is None:
            args.max_iter = 20000 if args.family == "product-spheres" else 200
        if not args.tol > 0:
            return _fail(2, "validation", "--tol must be positive")
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        return _fail(2, "validation", str(exc))
    except (NumericalError, GeometryError, FloatingPointError) as exc:
        return _fail(1, "numerical", str(exc))


if __name__ == "__main__":
    sys.exit(main())
