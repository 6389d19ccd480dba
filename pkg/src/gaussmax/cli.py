"""Command-line interface.

Every command writes a single JSON document to stdout (machine-oriented,
sorted keys); diagnostics go to stderr.  Exit codes: 0 success / passing
verification, 1 failing verification, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import closedform, geometry, montecarlo, optimize, verify
from .corrmat import (
    CorrelationMatrix4,
    classify,
    load_matrix,
    parse_offdiag_text,
    to_json_obj,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2


def _emit(doc: dict, pretty: bool) -> None:
    print(json.dumps(doc, sort_keys=True, indent=2 if pretty else None))


def _matrix_from_args(args) -> CorrelationMatrix4:
    if getattr(args, "corr", None):
        return parse_offdiag_text(args.corr)
    if getattr(args, "file", None):
        return load_matrix(args.file)
    raise ValueError("provide a matrix via --corr or --file")


def _tolerances() -> dict:
    return {
        "eps_psd": 1e-10,
        "eps_one": 1e-12,
        "eps_clamp": closedform.EPS_CLAMP,
    }


def _cmd_compute(args) -> int:
    if args.corr3:
        parts = [float(p) for p in args.corr3.split(",")]
        if len(parts) != 3:
            raise ValueError("--corr3 needs exactly 3 values r12,r13,r23")
        value = closedform.f_max3(*parts)
        _emit({"command": "compute", "inputs": {"corr3": parts},
               "f_max3": value, "tolerances": _tolerances()}, args.pretty)
        return EXIT_OK
    m = _matrix_from_args(args)
    doc = {
        "command": "compute",
        "inputs": to_json_obj(m),
        "classification": classify(m).tag.value,
        "f_max": closedform.f_max(m),
        "tolerances": _tolerances(),
    }
    _emit(doc, args.pretty)
    return EXIT_OK


def _cmd_grad(args) -> int:
    m = _matrix_from_args(args)
    _emit({"command": "grad", "inputs": to_json_obj(m),
           "gradient": list(closedform.gradient(m)),
           "tolerances": _tolerances()}, args.pretty)
    return EXIT_OK


def _cmd_hessian(args) -> int:
    m = _matrix_from_args(args)
    h = closedform.hessian(m)
    _emit({"command": "hessian", "inputs": to_json_obj(m),
           "hessian": [list(row) for row in h],
           "tolerances": _tolerances()}, args.pretty)
    return EXIT_OK


def _cmd_mc(args) -> int:
    m = _matrix_from_args(args)
    doc = {
        "command": "mc",
        "inputs": to_json_obj(m),
        "samples": args.samples,
        "seed": args.seed,
        "shards": args.shards,
    }
    est = montecarlo.estimate_max(m, args.samples, args.seed, shards=args.shards)
    doc["estimate"] = {"mean": est.mean, "std_error": est.std_error,
                       "n_samples": est.n_samples, "seed": est.seed}
    if args.order_stats:
        os_ = montecarlo.estimate_order_stats(m, args.samples, args.seed, shards=args.shards)
        doc["order_stats"] = {
            "e1": os_.e1, "e2": os_.e2, "e3": os_.e3, "e4": os_.e4,
            "std_errors": list(os_.std_errors),
            "se_third_identity": os_.se_third_identity,
            "se_second_identity": os_.se_second_identity,
        }
    _emit(doc, args.pretty)
    return EXIT_OK


def _cmd_meanwidth(args) -> int:
    if args.tetra:
        t = geometry.load_tetrahedron(args.tetra)
        inputs = t.to_json_obj()
    else:
        m = _matrix_from_args(args)
        t = geometry.embed(m)
        inputs = to_json_obj(m)
    w = geometry.mean_width(t, quad_order=args.order)
    _emit({"command": "meanwidth", "inputs": inputs, "quad_order": args.order,
           "mean_width": w,
           "gaussian_radial_factor": geometry.GAUSSIAN_RADIAL_FACTOR}, args.pretty)
    return EXIT_OK


def _cmd_dihedrals(args) -> int:
    m = _matrix_from_args(args)
    ds = geometry.dihedrals(m)
    _emit({"command": "dihedrals", "inputs": to_json_obj(m),
           "alpha": list(ds.alpha),
           "facet_pairs": ["%d%d" % (i + 1, j + 1) for i, j in geometry.FACET_PAIRS]},
          args.pretty)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    if args.start == "identity":
        start = CorrelationMatrix4.identity()
    elif args.start == "random":
        start = optimize.random_interior(np.random.default_rng(args.seed))
    elif args.start == "file":
        if not args.file:
            raise ValueError("--start file needs --file")
        start = load_matrix(args.file)
    else:
        raise ValueError(f"unknown start {args.start!r}")
    cfg = optimize.AscentConfig(grad_tol=args.tol, max_iters=args.max_iters)
    res = optimize.maximize(start, cfg)
    doc = {
        "command": "optimize",
        "inputs": {"start": to_json_obj(start), "seed": args.seed, "tol": args.tol},
        "argmax": to_json_obj(res.argmax),
        "value": res.value,
        "iterations": res.iterations,
        "converged": res.converged,
        "trajectory_summary": [list(t) for t in res.trajectory_summary],
    }
    _emit(doc, args.pretty)
    return EXIT_OK


def _battery(seed: int, count: int) -> list[CorrelationMatrix4]:
    rng = np.random.default_rng(seed)
    return [optimize.random_interior(rng) for _ in range(count)]


def _suite_reports(suite: str, seed: int) -> list[verify.ScanReport]:
    reports: list[verify.ScanReport] = []
    if suite in ("identity", "all"):
        reports.append(verify.polynomial_identity())
    if suite in ("monotonicity", "all"):
        reports.append(verify.h_monotonicity_scan())
        reports.append(verify.p_ordering_scan())
    if suite in ("inequality", "all"):
        reports.append(verify.p_inequality_scan())
    if suite in ("nonconcavity", "all"):
        reports.append(verify.nonconcavity_example())
    if suite in ("hessian", "all"):
        for m in _battery(seed, 20):
            reports.append(verify.euler_relation_check(m))
        rng = np.random.default_rng(seed + 1)
        for _ in range(10):
            reports.append(verify.nonobtuse_hessian_check(verify.sample_nonobtuse_interior(rng)))
    if suite in ("bounds", "all"):
        for m in _battery(seed, 20):
            reports.append(verify.bounds_check(m))
        for m in (CorrelationMatrix4.identity(),
                  CorrelationMatrix4.equicorrelated(-1 / 3),
                  CorrelationMatrix4.equicorrelated(1.0)):
            reports.append(verify.bounds_check(m))
    if not reports:
        raise ValueError(f"unknown suite {suite!r}")
    return reports


def _cmd_verify(args) -> int:
    reports = _suite_reports(args.suite, args.seed)
    ok = all(r.passed for r in reports)
    doc = {
        "command": "verify",
        "suite": args.suite,
        "pass": ok,
        "reports": [r.to_json_obj() for r in reports],
    }
    if args.suite == "identity":
        doc["residual"] = 0 if ok else int(reports[0].worst_margin)
    _emit(doc, args.pretty)
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def _cmd_scan(args) -> int:
    if args.kind == "u-interval":
        rep = verify.u_interval_scan(args.x, args.y, n=args.n)
    elif args.kind == "p-inequality":
        rep = verify.p_inequality_scan(verify.PInequalityGrid(n_theta=args.n_theta, n_u=args.n_u))
    elif args.kind == "h-monotonicity":
        rep = verify.h_monotonicity_scan(
            verify.HMonotonicityGrid(n_pairs=args.n_pairs, z_steps=args.z_steps))
    elif args.kind == "p-ordering":
        rep = verify.p_ordering_scan()
    else:
        raise ValueError(f"unknown scan kind {args.kind!r}")
    _emit({"command": "scan", "kind": args.kind, "pass": rep.passed,
           "report": rep.to_json_obj()}, args.pretty)
    return EXIT_OK if rep.passed else EXIT_VERIFY_FAIL


def _add_matrix_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corr", help="six comma-separated correlations (12,13,14,23,24,34)")
    p.add_argument("--file", help="matrix file (text line or JSON with 'offdiag')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussmax",
        description="Expected maximum of 4-D unit-variance Gaussian vectors: "
                    "closed forms, derivatives, Monte Carlo, geometry, "
                    "optimization and verification scans.",
        epilog="GAUSSMAX_THREADS caps worker threads (0 = auto); results "
               "never depend on the thread count. Exit codes: 0 ok / "
               "verification passed, 1 verification failed, 2 usage or "
               "domain error.",
    )
    parser.add_argument("--pretty", action="store_true", help="indent the JSON output")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("compute", help="closed-form expected maximum")
    _add_matrix_args(p)
    p.add_argument("--corr3", help="three correlations r12,r13,r23 for the 3-D formula")
    p.set_defaults(fn=_cmd_compute)

    p = sub.add_parser("grad", help="gradient of the expected maximum")
    _add_matrix_args(p)
    p.set_defaults(fn=_cmd_grad)

    p = sub.add_parser("hessian", help="Hessian of the expected maximum")
    _add_matrix_args(p)
    p.set_defaults(fn=_cmd_hessian)

    p = sub.add_parser("mc", help="Monte-Carlo estimate of the expected maximum")
    _add_matrix_args(p)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=None)
    p.add_argument("--order-stats", action="store_true", help="also estimate order statistics")
    p.set_defaults(fn=_cmd_mc)

    p = sub.add_parser("meanwidth", help="mean width by spherical quadrature")
    _add_matrix_args(p)
    p.add_argument("--tetra", help="tetrahedron JSON file with 'vertices'")
    p.add_argument("--order", type=int, default=50)
    p.set_defaults(fn=_cmd_meanwidth)

    p = sub.add_parser("dihedrals", help="outer dihedral angles")
    _add_matrix_args(p)
    p.set_defaults(fn=_cmd_dihedrals)

    p = sub.add_parser("optimize", help="projected gradient ascent to the maximizer")
    p.add_argument("--start", choices=("identity", "random", "file"), default="identity")
    p.add_argument("--file", help="start matrix when --start file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.set_defaults(fn=_cmd_optimize)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all",
                   choices=("identity", "monotonicity", "inequality",
                            "nonconcavity", "hessian", "bounds", "all"))
    p.add_argument("--seed", type=int, default=20240401)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("scan", help="parameterized scans")
    p.add_argument("--kind", required=True,
                   choices=("u-interval", "p-inequality", "h-monotonicity", "p-ordering"))
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--y", type=float, default=0.5)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--n-theta", type=int, default=500)
    p.add_argument("--n-u", type=int, default=500)
    p.add_argument("--n-pairs", type=int, default=50)
    p.add_argument("--z-steps", type=int, default=200)
    p.set_defaults(fn=_cmd_scan)

    return parser


def _merge_dash_values(argv: list[str]) -> list[str]:
    # "--corr -0.3,..." would be read as two options; fold the value in
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--corr", "--corr3") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_dash_values(list(argv)))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
