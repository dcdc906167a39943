#!/usr/bin/env python3
"""Compare the clustering functional of heavy-tailed vs Gaussian walks.

Writes figure1_ordering.{json,csv} into --out-dir.
"""

import argparse

from trajtail.experiments import StudySpec, emit_report, run_study


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replicates", type=int, default=None)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--threads", type=int, default=2)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()

    result = run_study(StudySpec("figure1_ordering", replicates=args.replicates, seed=args.seed), threads=args.threads)
    paths = emit_report(result, args.out_dir)
    g = result.stats["gamma2"]
    print(f"stable: {g.mean[0]:.4f} [{g.lo95[0]:.4f}, {g.hi95[0]:.4f}]")
    print(f"gauss:  {g.mean[1]:.4f} [{g.lo95[1]:.4f}, {g.hi95[1]:.4f}]")
    print(f"verdicts: {result.verdicts}  ({result.runtime_seconds:.0f}s)")
    print("wrote:", *[str(p) for p in paths])


if __name__ == "__main__":
    main()
