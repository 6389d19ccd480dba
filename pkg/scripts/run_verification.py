#!/usr/bin/env python3
"""Run every verification suite and write one JSON report.

Usage: python scripts/run_verification.py [--out report.json] [--seed N]
Exit code 0 iff every check passes.
"""

import argparse
import json
import sys
import time

import numpy as np

from gaussmax.optimize import random_interior
from gaussmax.verify import (
    bounds_check,
    euler_relation_check,
    h_monotonicity_scan,
    nonconcavity_example,
    nonobtuse_hessian_check,
    p_inequality_scan,
    p_ordering_scan,
    polynomial_identity,
    sample_nonobtuse_interior,
    u_interval_scan,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=None, help="write the JSON report here")
    ap.add_argument("--seed", type=int, default=20240401)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    battery = [random_interior(rng) for _ in range(20)]

    reports = []

    def run(label, fn):
        t0 = time.time()
        rep = fn()
        obj = rep.to_json_obj()
        obj["label"] = label
        obj["seconds"] = round(time.time() - t0, 3)
        reports.append(obj)
        print(f"{'PASS' if rep.passed else 'FAIL'}  {label:34s} "
              f"margin={rep.worst_margin:.3e}  ({obj['seconds']}s)")

    run("polynomial identity", polynomial_identity)
    run("H monotonicity scan", h_monotonicity_scan)
    run("P ordering scan", p_ordering_scan)
    run("P positivity inequality", p_inequality_scan)
    run("non-concavity example", nonconcavity_example)
    for i, m in enumerate(battery):
        run(f"derivative balance #{i}", lambda m=m: euler_relation_check(m))
        run(f"value bounds #{i}", lambda m=m: bounds_check(m))
    for i in range(10):
        m = sample_nonobtuse_interior(rng)
        run(f"nonobtuse hessian #{i}", lambda m=m: nonobtuse_hessian_check(m))
    for i in range(20):
        x, y = rng.uniform(0.05, 1.4, 2)
        if x * y >= 1:
            continue
        run(f"interval structure ({x:.2f},{y:.2f})",
            lambda x=x, y=y: u_interval_scan(x, y, n=10_000))

    ok = all(r["pass"] for r in reports)
    doc = {"pass": ok, "seed": args.seed, "reports": reports}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
        print(f"wrote {args.out}")
    print("ALL PASS" if ok else "FAILURES PRESENT")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
