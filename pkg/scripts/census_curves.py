"""Exact expected tree counts a(k)_i next to one realised census, as CSV.

    python3 scripts/census_curves.py geometric:base=2 2000 > census.csv
"""

import csv
import sys

from radolab.components import ComponentTracker, expectation_table
from radolab.engine import ProcessRng, grow
from radolab.sequence import parse_sequence


def main(spec: str = "geometric:base=2", horizon: int = 2000, k_max: int = 5, seed: int = 0) -> None:
    seq = parse_sequence(spec)
    table = expectation_table(seq, k_max, horizon - 1)
    tracker = ComponentTracker()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["i"] + [f"a{k}" for k in range(1, k_max + 1)] + [f"N{k}" for k in range(1, k_max + 1)])

    def observer(i, b, g):
        tracker.observe_round(i, b)
        w.writerow([i] + [f"{float(table(k, i)):.6g}" for k in range(1, k_max + 1)]
                   + [tracker.census.get(k, 0) for k in range(1, k_max + 1)])

    grow(seq, horizon, ProcessRng(seed), [observer])


if __name__ == "__main__":
    main(*(a if k == 0 else int(a) for k, a in enumerate(sys.argv[1:])))
