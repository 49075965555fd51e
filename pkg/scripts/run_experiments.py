#!/usr/bin/env python3
"""Run the standard experiment battery as independent CLI jobs.

Each experiment is a separate ``meanmult`` invocation; a small scheduler
runs up to --workers of them in parallel and collects exit codes.  Reports
land in --out-dir as JSON (written atomically by the CLI).

Usage: python scripts/run_experiments.py --out-dir reports --workers 4 [--limit 1e6]
"""

import argparse
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor


def jobs(out_dir: str, limit: str, coeff_file: str):
    cp = "1e4,1e5," + limit
    j = {
        "sign-eq": ["sign-eq", "--coeff-file", coeff_file, "--checkpoints", cp],
        "density-d5": ["density", "--spec", "tau-indicator", "--coeff-file", coeff_file,
                        "--modulus", "5", "--checkpoints", cp],
        "density-cm4": ["density", "--spec", "cm-indicator", "--modulus", "4",
                         "--limit", limit, "--checkpoints", cp],
        "abs-density-d7": ["abs-density", "--coeff-file", coeff_file, "--modulus", "7",
                            "--checkpoints", cp],
        "lemma10": ["lemma10", "--coeff-file", coeff_file, "--checkpoints", cp],
        "wirsing-ones": ["wirsing", "--spec", "one", "--tau-w", "1", "--checkpoints", cp],
        "wirsing-divisor": ["wirsing", "--spec", "divisor", "--tau-w", "2", "--checkpoints", cp],
        "wirsing-cm": ["wirsing", "--spec", "cm-indicator", "--modulus", "4",
                        "--tau-w", "0.5", "--checkpoints", cp],
        "example3": ["example3", "--c", "0.5", "--x-max", limit, "--T", "10",
                      "--g-csv-out", os.path.join(out_dir, "example3_primes.csv")],
        "theorem2-ones": ["theorem2", "--spec", "one", "--x", limit, "--T", "4",
                           "--c", "1", "--beta", "1"],
        "lambda-min-mobius": ["lambda-min", "--spec", "mobius", "--x", limit, "--T", "10",
                               "--csv", os.path.join(out_dir, "rho_mobius.csv")],
        "d-sweep": ["d-sweep", "--coeff-file", coeff_file, "--d-min", "2", "--d-max", "50",
                     "--x", limit, "--csv", os.path.join(out_dir, "d_sweep.csv")],
    }
    return j


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--limit", default="1e6")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    coeff_file = os.path.join(args.out_dir, "tau.csv")
    print(f"generating coefficients to {args.limit} ...", flush=True)
    rc = subprocess.call(
        [sys.executable, "-m", "meanmult", "tau-gen", "--limit", args.limit,
         "--coeff-out", coeff_file, "--out", os.path.join(args.out_dir, "tau-gen.json")]
    )
    if rc != 0:
        sys.exit(rc)

    def run(item):
        name, argv = item
        out = os.path.join(args.out_dir, f"{name}.json")
        cmd = [sys.executable, "-m", "meanmult", *argv, "--out", out]
        code = subprocess.call(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        return name, code

    results = {}
    with ThreadPoolExecutor(max_workers=args.workers) as ex:
        for name, code in ex.map(run, sorted(jobs(args.out_dir, args.limit, coeff_file).items())):
            results[name] = code
            print(f"{'ok' if code == 0 else f'exit {code}'}  {name}", flush=True)

    bad = {k: v for k, v in results.items() if v != 0}
    if bad:
        print(f"{len(bad)} job(s) failed: {bad}", file=sys.stderr)
        sys.exit(2)
    print(f"all {len(results)} jobs passed; reports in {args.out_dir}/")


if __name__ == "__main__":
    main()
