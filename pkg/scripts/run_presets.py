"""Run every experiment preset at its default size and write JSON reports.

    python3 scripts/run_presets.py --out reports --seed 1 --workers 1
"""

import argparse
import pathlib
import sys
import time

from radolab.experiments import PRESETS, ExperimentPlan, run
from radolab.harness import BudgetExceeded


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", choices=sorted(PRESETS))
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name in args.only or PRESETS:
        t0 = time.monotonic()
        try:
            rep = run(ExperimentPlan(name, base_seed=args.seed), args.workers)
        except BudgetExceeded as exc:
            rep = exc.report
        (out / f"{name}.json").write_text(rep.to_json())
        failed += not rep.passed
        print(f"{'PASS' if rep.passed else 'FAIL'}  {name:14s} {time.monotonic() - t0:6.1f}s")
        for s in rep.failures():
            print(f"      {s.name}: mean {s.mean:.4g}, z {s.z}")
    return int(failed > 0)


if __name__ == "__main__":
    sys.exit(main())
