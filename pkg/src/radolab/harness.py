"""Replica execution and 3-SE statistics for Monte Carlo experiments."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exact import fmt

SE_BAND = 3

STAT_COLUMNS = ("name", "target", "bound", "mean", "se", "z", "pass")


class BudgetExceeded(RuntimeError):
    """Raised when an experiment runs past its time budget.

    ``report`` holds statistics over the replicas that did finish; it is
    marked invalid.
    """

    def __init__(self, message: str, report: ExperimentReport):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Tally:
    """Exact running sums of integer replica values."""

    n: int = 0
    total: int = 0
    squares: int = 0

    @classmethod
    def of(cls, values: Iterable[int]) -> Tally:
        n = total = squares = 0
        for v in values:
            n += 1
            total += v
            squares += v * v
        return cls(n, total, squares)

    @property
    def mean(self) -> Fraction:
        return Fraction(self.total, self.n)

    @property
    def variance(self) -> Fraction:
        """Unbiased sample variance."""
        if self.n < 2:
            return Fraction(0)
        return (self.squares - Fraction(self.total**2, self.n)) / (self.n - 1)

    @property
    def se(self) -> float:
        return math.sqrt(self.variance / self.n)


@dataclass
class Stat:
    """One reported statistic and its verdict.

    ``target`` is an exact equality target; ``bound`` is a printable
    one-sided condition such as ``"<= 1/4"`` or ``"> 0"``.
    """

    name: str
    mean: float
    se: float
    passed: bool
    target: Fraction | None = None
    bound: str | None = None
    z: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "target": None if self.target is None else fmt(self.target),
            "bound": self.bound,
            "mean": self.mean,
            "se": self.se,
            "z": self.z,
            "pass": self.passed,
        }


def _z(diff: Fraction, se: float) -> float | None:
    if se > 0:
        return float(diff) / se
    return 0.0 if diff == 0 else None


def _within(excess: Fraction, se: float) -> bool:
    """``excess <= 3 se``, exact when the band is empty."""
    return excess <= 0 or (se > 0 and float(excess) <= SE_BAND * se)


def stat_equal(name: str, tally: Tally, target: Fraction) -> Stat:
    diff = tally.mean - target
    return Stat(name, float(tally.mean), tally.se, _within(abs(diff), tally.se),
                target=Fraction(target), z=_z(diff, tally.se))


def stat_at_most(name: str, tally: Tally, bound: Fraction | float, target: Fraction | None = None) -> Stat:
    bound_q = Fraction(bound)
    diff = tally.mean - bound_q
    ok = _within(diff, tally.se)
    if target is not None:
        ok = ok and _within(abs(tally.mean - target), tally.se)
    label = fmt(bound_q) if isinstance(bound, Fraction) else repr(float(bound))
    return Stat(name, float(tally.mean), tally.se, ok, target=target,
                bound=f"<= {label}", z=_z(diff, tally.se))


def stat_at_least(name: str, tally: Tally, bound: Fraction | float) -> Stat:
    bound_q = Fraction(bound)
    diff = tally.mean - bound_q
    label = fmt(bound_q) if isinstance(bound, Fraction) else repr(float(bound))
    return Stat(name, float(tally.mean), tally.se, _within(-diff, tally.se),
                bound=f">= {label}", z=_z(diff, tally.se))


def stat_positive(name: str, tally: Tally) -> Stat:
    return Stat(name, float(tally.mean), tally.se, tally.total > 0, bound="> 0")


@dataclass
class ExperimentReport:
    preset: str
    seq: str
    horizon: int
    replicas: int
    base_seed: int
    stats: list[Stat] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    wall_ms: int | None = None
    valid: bool = True

    @property
    def passed(self) -> bool:
        return self.valid and all(s.passed for s in self.stats)

    def failures(self) -> list[Stat]:
        return [s for s in self.stats if not s.passed]

    def to_dict(self, include_timing: bool = False) -> dict:
        """Serialisable form.  Wall time is left out unless asked for, so that
        reruns of one plan serialise to identical bytes."""
        out = {
            "preset": self.preset,
            "seq": self.seq,
            "horizon": self.horizon,
            "replicas": self.replicas,
            "base_seed": self.base_seed,
            "stats": [s.to_dict() for s in self.stats],
            "wall_ms": self.wall_ms if include_timing else None,
            "valid": self.valid,
        }
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(STAT_COLUMNS)
        for s in self.stats:
            d = s.to_dict()
            w.writerow(["" if d[c] is None else d[c] for c in STAT_COLUMNS])
        return buf.getvalue()


# -- replica execution -------------------------------------------------------


def run_replicas(
    func: Callable[[int], object],
    replicas: int,
    workers: int = 1,
    time_budget_s: float | None = None,
    chunk: int = 256,
) -> tuple[list, bool]:
    """Evaluate ``func(r)`` for ``r = 0..replicas-1``, results in replica order.

    ``func`` must be picklable when ``workers > 1``.  With a time budget the
    run stops after the first chunk that ends past it; the second return
    value is False in that case.
    """
    start = time.monotonic()
    results: list = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for lo in range(0, replicas, chunk):
            hi = min(lo + chunk, replicas)
            if pool is None:
                results.extend(func(r) for r in range(lo, hi))
            else:
                results.extend(pool.map(func, range(lo, hi), chunksize=max(1, (hi - lo) // (4 * workers))))
            if time_budget_s is not None and time.monotonic() - start > time_budget_s and hi < replicas:
                return results, False
    finally:
        if pool is not None:
            pool.shutdown()
    return results, True


def columns(rows: Sequence[Sequence[int]]) -> list[Tally]:
    """Per-column tallies of replica result rows."""
    if not rows:
        return []
    return [Tally.of(col) for col in zip(*rows)]
