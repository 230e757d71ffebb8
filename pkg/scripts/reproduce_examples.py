"""Run the three worked examples at full size and write their reports.

    python scripts/reproduce_examples.py --out runs/examples --threads 2
"""

import argparse
import time

from morseflow.scenarios import SCENARIOS, run_scenario


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/examples")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("names", nargs="*", default=list(SCENARIOS))
    args = ap.parse_args()
    failed = 0
    for name in args.names:
        start = time.perf_counter()
        rep = run_scenario(name, seed=args.seed, threads=args.threads)
        rep.write(args.out)
        print(f"{name}: {'passed' if rep.passed else 'FAILED'} in {time.perf_counter() - start:.1f}s")
        for c in rep.claims:
            print(f"  {'ok  ' if c.passed else 'FAIL'} {c.id:<26} {c.statement}")
        failed += not rep.passed
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
