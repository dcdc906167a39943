#!/usr/bin/env python3
"""Ball-mass exponent of Gaussian walks against the ambient dimension.

Writes gaussian_dimension.{json,csv} into --out-dir.
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

    result = run_study(StudySpec("gaussian_dimension", replicates=args.replicates, seed=args.seed), threads=args.threads)
    paths = emit_report(result, args.out_dir)
    for dim, mean in zip(result.grid, result.stats["alpha_hat"].mean):
        print(f"dim={dim}  alpha_hat={mean:.4f}")
    print(f"verdicts: {result.verdicts}  ({result.runtime_seconds:.0f}s)")
    print("wrote:", *[str(p) for p in paths])


if __name__ == "__main__":
    main()
