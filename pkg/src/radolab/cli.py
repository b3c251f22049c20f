"""``radolab`` command line.

Exit codes: 0 success, 1 a failed check in ``experiment``, 2 usage or
input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import experiments
from .analysis import radocity_series
from .components import track
from .engine import ProcessRng, grow
from .exact import fmt
from .harness import BudgetExceeded
from .sequence import SequenceError, parse_sequence
from .series import EnumerationBudgetError, injectivity_defect_bound_check, rearrangement_identity_check

HORIZON_CAP = 10**7
REPLICA_CAP = 10**6


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("RADOLAB_SEED")
    if raw is None:
        return 0
    if not raw.isdigit() or int(raw) >= 2**64:
        raise UsageError(f"RADOLAB_SEED must be an unsigned 64-bit integer, got {raw!r}")
    return int(raw)


def _check_caps(args, horizon: int | None = None, replicas: int | None = None) -> None:
    if args.unsafe_limits:
        return
    if horizon is not None and horizon > HORIZON_CAP:
        raise UsageError(f"horizon {horizon} exceeds the cap of {HORIZON_CAP}; pass --unsafe-limits to override")
    if replicas is not None and replicas > REPLICA_CAP:
        raise UsageError(f"replicas {replicas} exceeds the cap of {REPLICA_CAP}; pass --unsafe-limits to override")


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _param_value(text: str):
    if "," in text:
        return [_param_value(t) for t in text.split(",") if t]
    try:
        return int(text)
    except ValueError:
        return text


# -- commands ----------------------------------------------------------------


def cmd_grow(args) -> tuple[str, int]:
    _check_caps(args, horizon=args.n)
    seq = parse_sequence(args.seq)
    g = grow(seq, args.n, ProcessRng(args.seed))
    if args.format == "json":
        return _json({"n": g.n, "seed": g.seed, "birth_sets": g.birth_sets}), 0
    if args.format == "csv":
        return _csv(g.edges(), ("u", "v")), 0
    return g.dump(), 0


def cmd_analyze(args) -> tuple[str, int]:
    _check_caps(args, horizon=args.horizon)
    rep = radocity_series(parse_sequence(args.seq), args.t_max, args.horizon)
    d = rep.to_dict()
    if args.format == "json":
        return _json(d), 0
    if args.format == "csv":
        rows = [(r["t"], r["power_form"], r["factorial_form"], r["power_form_float"], r["factorial_form_float"])
                for r in d["per_t"]]
        return _csv(rows, ("t", "power_form", "factorial_form", "power_form_float", "factorial_form_float")), 0
    lines = [f"horizon {d['horizon']}  verdict {d['verdict']}  ({d['family_note']})"]
    lines += [f"t={r['t']}: {r['power_form_float']:.6g}  {r['factorial_form_float']:.6g}" for r in d["per_t"]]
    return "\n".join(lines) + "\n", 0


def cmd_census(args) -> tuple[str, int]:
    _check_caps(args, horizon=args.n)
    seq = parse_sequence(args.seq)
    rep = track(grow(seq, args.n, ProcessRng(args.seed))).census_report()
    if args.format == "json":
        return _json(rep), 0
    rows = [("tree", m, c) for m, c in rep["census"].items()]
    rows += [("star", l, c) for l, c in rep["stars"].items()]
    if args.format == "csv":
        return _csv(rows, ("kind", "size", "count")), 0
    lines = [f"horizon {rep['horizon']}  zero rounds {rep['zero_count']}"]
    lines += [f"{kind} {size}: {count}" for kind, size, count in rows]
    return "\n".join(lines) + "\n", 0


def cmd_series_check(args) -> tuple[str, int]:
    seq = parse_sequence(args.seq)
    out = {"l": args.l, "M": args.M}
    if args.check in ("rearrangement", "both"):
        out["rearrangement"] = rearrangement_identity_check(seq, args.l, args.M).to_dict()
    if args.check in ("defect", "both"):
        out["injectivity_defect"] = injectivity_defect_bound_check(seq, args.l, args.M)
    ok = out.get("rearrangement", {}).get("equal", True) and out.get("injectivity_defect", {}).get("holds", True)
    if args.format == "json":
        return _json(out), 0 if ok else 1
    rows = []
    if "rearrangement" in out:
        r = out["rearrangement"]
        rows.append(("rearrangement", r["lhs"], r["rhs"], r["equal"]))
    if "injectivity_defect" in out:
        r = out["injectivity_defect"]
        rows.append(("injectivity_defect", r["lhs"], r["rhs"], r["holds"]))
    if args.format == "csv":
        return _csv(rows, ("check", "lhs", "rhs", "holds")), 0 if ok else 1
    return "".join(f"{c}: {h}  ({float(Fraction(a)):.6g} vs {float(Fraction(b)):.6g})\n"
                   for c, a, b, h in rows), 0 if ok else 1


def cmd_experiment(args) -> tuple[str, int]:
    _check_caps(args, horizon=args.horizon, replicas=args.replicas)
    params = {}
    for item in args.param or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        params[key.replace("-", "_")] = _param_value(value)
    if args.rounds is not None:
        params["rounds"] = args.rounds
    plan = experiments.ExperimentPlan(args.preset, args.seq, args.horizon, args.replicas, args.seed,
                                      params, args.time_budget)
    try:
        rep = experiments.run(plan, args.workers)
    except BudgetExceeded as exc:
        print(f"radolab: {exc}; partial report marked invalid", file=sys.stderr)
        rep = exc.report
    if args.format == "csv":
        text = rep.to_csv()
    elif args.format == "text":
        text = "".join(
            f"{'PASS' if s.passed else 'FAIL'}  {s.name}: mean {s.mean:.6g} se {s.se:.3g}"
            f"{'  target ' + fmt(s.target) if s.target is not None else ''}"
            f"{'  bound ' + s.bound if s.bound else ''}\n"
            for s in rep.stats
        )
    else:
        text = rep.to_json(include_timing=args.timing)
    for s in rep.failures():
        print(f"radolab: failed check {s.name!r} (z={s.z})", file=sys.stderr)
    return text, 0 if rep.passed else 1


def cmd_report(args) -> tuple[str, int]:
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read report {args.input}: {exc}") from None
    stats = data.get("stats")
    if stats is None:
        raise UsageError(f"{args.input} is not an experiment report (no 'stats')")
    if args.format == "plot":
        rows = [(k, s["mean"], 3 * s["se"]) for k, s in enumerate(stats)]
        return _csv(rows, ("x", "y", "band")), 0
    cols = ("name", "target", "bound", "mean", "se", "z", "pass")
    return _csv([["" if s.get(c) is None else s[c] for c in cols] for s in stats], cols), 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="radolab", description="Degree-sequence graph growth: simulation and exact checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write here instead of standard output")
    common.add_argument("--unsafe-limits", action="store_true", help="lift the horizon and replica caps")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, formats=("json", "csv", "text"), default="json", **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.add_argument("--format", choices=formats, default=default)
        sp.set_defaults(func=fn)
        return sp

    sp = add("grow", cmd_grow, default="text", help="grow one graph and dump it")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int)

    sp = add("analyze", cmd_analyze, help="exact radocity series partial sums")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--t-max", type=int, default=3)
    sp.add_argument("--horizon", type=int, required=True)

    sp = add("census", cmd_census, help="tree and star census of one grown graph")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int)

    sp = add("series-check", cmd_series_check, help="exact index-family identities")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--check", choices=("rearrangement", "defect", "both"), default="both")

    sp = add("experiment", cmd_experiment, help="run a preset Monte Carlo experiment")
    sp.add_argument("--preset", required=True, choices=sorted(experiments.PRESETS))
    sp.add_argument("--seq")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--replicas", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--rounds", type=int, help="triangle preset: number of inserted 2's")
    sp.add_argument("--param", action="append", metavar="KEY=VALUE",
                    help="preset parameter; comma-separated values become lists")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--time-budget", type=float, help="seconds before the run stops and reports partial results")
    sp.add_argument("--timing", action="store_true", help="include wall time in JSON output")

    sp = add("report", cmd_report, formats=("csv", "plot"), default="csv",
             help="flatten an experiment report to CSV or (x, y, band) plot data")
    sp.add_argument("input")
    return p


def main(argv: list[str] | None = None) -> int:
    # exact partial sums at large horizons have numerators far beyond 4300 digits
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed"):
            if args.seed is None:
                args.seed = _default_seed()
            if not 0 <= args.seed < 2**64:
                raise UsageError("seed must be an unsigned 64-bit integer")
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        text, code = args.func(args)
    except (UsageError, SequenceError, EnumerationBudgetError, ValueError) as exc:
        print(f"radolab {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
