"""Print radocity partial sums for the registered families at a few horizons."""

import sys

from radolab.analysis import radocity_series
from radolab.sequence import parse_sequence

SPECS = ["const-frac:1/2", "ones", "geometric:base=2", "powers:q=2", "triangle:rounds=3", "bernoulli:p=1/2,seed=1"]


def main(horizons=(100, 1000, 10_000), t_max=3) -> None:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    for spec in SPECS:
        seq = parse_sequence(spec)
        for h in horizons:
            rep = radocity_series(seq, t_max, h)
            sums = "  ".join(f"t={t}: {float(p):10.4f} {float(f):10.4f}" for t, (p, f) in rep.per_t.items())
            print(f"{spec:24s} {h:6d}  {str(rep.verdict):10s} {sums}")


if __name__ == "__main__":
    main()
