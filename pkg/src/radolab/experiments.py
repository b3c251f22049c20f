"""Preset Monte Carlo experiments, each checked against exact targets.

Every experiment runs independent replicas; replica ``r`` draws from
``ProcessRng(base_seed, stream=r)``, so results do not depend on the number
of workers.  Per-replica outputs are small integer tuples and are reduced
exactly, in replica order.

``horizon`` always counts vertices: a run of horizon ``n`` performs rounds
``0..n-1``, and index-based quantities (``a(k)_i``, ``t_{i,m}``) are read at
indices up to ``n - 1``.
"""

from __future__ import annotations

import bisect
import itertools
import math
import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import harness
from .analysis import generalized_witness_probability, no_hit_probability
from .components import ComponentTracker, expectation_table, longest_new_path_probe
from .engine import ProcessRng, count_triangles, derive_seed, grow, sample_uniform_subset, triangles_closed_at
from .exact import exact_prod, exact_sum, fmt
from .harness import BudgetExceeded, ExperimentReport, Tally, columns
from .sequence import (
    Bernoulli,
    DegreeSequence,
    build_triangle_construction,
    ledger,
    parse_sequence,
    regime,
)

_MASK64 = 2**64 - 1


@dataclass
class ExperimentPlan:
    preset: str
    seq: str | None = None
    horizon: int | None = None
    replicas: int | None = None
    base_seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)
    time_budget_s: float | None = None

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r} (choose from {', '.join(PRESETS)})")
        if self.replicas is not None and self.replicas < 2:
            raise ValueError("replicas must be >= 2")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0 <= self.base_seed <= _MASK64:
            raise ValueError("base_seed must be an unsigned 64-bit integer")


def _finish(report: ExperimentReport, complete: bool, got: int, start: float) -> ExperimentReport:
    report.wall_ms = int((time.monotonic() - start) * 1000)
    if not complete:
        report.valid = False
        report.replicas = got
        raise BudgetExceeded(f"time budget exhausted after {got} replicas", report)
    return report


# -- triangle construction ---------------------------------------------------


@dataclass(frozen=True)
class _TriangleReplica:
    seq: DegreeSequence
    n: int
    seed: int

    def __call__(self, r: int) -> tuple[int, int, int]:
        g = grow(self.seq, self.n, ProcessRng(self.seed, r))
        for i, b in enumerate(g.birth_sets):
            # a vertex joining with one edge cannot close a cycle
            if len(b) <= 1:
                assert triangles_closed_at(g, i) == 0
        x = count_triangles(g)
        return x, int(x == 0), int(x > 0)


def triangle_check(rounds: int, replicas: int, seed: int, horizon: int | None = None,
                   workers: int = 1, time_budget_s: float | None = None) -> ExperimentReport:
    """Triangle count against the sum of the construction's closing probabilities."""
    start = time.monotonic()
    seq = build_triangle_construction(rounds)
    n = seq.two_positions[-1] + 1 if horizon is None else horizon
    if n <= seq.two_positions[-1]:
        raise ValueError(f"horizon {n} does not reach the last inserted 2 at {seq.two_positions[-1]}")
    rows, complete = harness.run_replicas(_TriangleReplica(seq, n, seed), replicas, workers, time_budget_s)
    x, zero, pos = columns(rows)
    target = exact_sum(seq.probabilities)
    report = ExperimentReport("triangle", seq.spec, n, replicas, seed)
    report.stats = [
        harness.stat_equal("mean triangle count", x, target),
        harness.stat_positive("Pr[X = 0]", zero),
        harness.stat_positive("Pr[X > 0]", pos),
    ]
    report.details = {
        "two_positions": list(seq.two_positions),
        "probabilities": [fmt(p) for p in seq.probabilities],
    }
    return _finish(report, complete, len(rows), start)


# -- witness law -------------------------------------------------------------


@dataclass(frozen=True)
class _WitnessReplica:
    cases: tuple[tuple[int, int, int, int], ...]  # (n, d, |A|, |B|)
    seed: int

    def __call__(self, r: int) -> tuple[int, ...]:
        rng = ProcessRng(self.seed, r)
        out = []
        for n, d, a, b in self.cases:
            # A = {0..a-1}, B = {a..a+b-1}
            s = sample_uniform_subset(rng, n, d)
            k = bisect.bisect_left(s, a + b)
            out.append(int(s[:k] == list(range(a))))
        return tuple(out)


def witness_law_check(cases, draws: int, seed: int, workers: int = 1,
                      time_budget_s: float | None = None, seq_label: str = "grid") -> ExperimentReport:
    """Frequency with which a uniform ``d``-subset of ``n`` contains A and avoids B.

    ``cases`` holds ``(n, d, k)`` (``|A| = |B| = k``) or ``(n, d, a, b)`` tuples.
    """
    start = time.monotonic()
    full = tuple((c[0], c[1], c[2], c[2]) if len(c) == 3 else tuple(c) for c in cases)
    rows, complete = harness.run_replicas(_WitnessReplica(full, seed), draws, workers, time_budget_s)
    report = ExperimentReport("witness", seq_label, max(c[0] for c in full), draws, seed)
    for (n, d, a, b), tally in zip(full, columns(rows)):
        report.stats.append(
            harness.stat_equal(f"witness n={n} d={d} |A|={a} |B|={b}", tally,
                               generalized_witness_probability(n, d, a, b))
        )
    return _finish(report, complete, len(rows), start)


def witness_cases(seq: DegreeSequence, n_grid, k: int) -> list[tuple[int, int, int]]:
    return [(n, seq.degree(n), k) for n in n_grid]


@dataclass(frozen=True)
class _WitnessCountReplica:
    seq: DegreeSequence
    n: int
    A: frozenset
    B: frozenset
    start: int
    seed: int

    def __call__(self, r: int) -> tuple[int]:
        from .analysis import WitnessQuery, count_witnesses

        g = grow(self.seq, self.n, ProcessRng(self.seed, r))
        return (count_witnesses(g, WitnessQuery(self.A, self.B, self.start)),)


def witness_count_check(seq: DegreeSequence, A, B, start: int, horizon: int, replicas: int,
                        seed: int, workers: int = 1) -> ExperimentReport:
    """Mean witness count in grown graphs against the sum of per-round probabilities.

    Needs ``start`` beyond every vertex of A and B so that each candidate's
    relation to A and B is settled by its own birth set.
    """
    A, B = frozenset(A), frozenset(B)
    if A | B and start <= max(A | B):
        raise ValueError("start must exceed every vertex of A and B")
    t0 = time.monotonic()
    degrees = seq.degrees(horizon)
    target = exact_sum(
        generalized_witness_probability(n, degrees[n], len(A), len(B)) for n in range(start, horizon)
    )
    rows, complete = harness.run_replicas(
        _WitnessCountReplica(seq, horizon, A, B, start, seed), replicas, workers
    )
    report = ExperimentReport("witness-count", seq.spec, horizon, replicas, seed)
    report.stats = [harness.stat_equal("mean witness count", columns(rows)[0], target)]
    return _finish(report, complete, len(rows), t0)


# -- tree census -------------------------------------------------------------


def default_census_grid(n: int, k_max: int = 5) -> list[tuple[int, int]]:
    """Twenty (k, i) points: for each k <= 5, i in {k-1, m/4, m/2, m} with m = n - 1."""
    m = n - 1
    grid = []
    for k in range(1, k_max + 1):
        for i in (min(k - 1, m), m // 4, m // 2, m):
            if (k, i) not in grid:
                grid.append((k, i))
    return grid


@dataclass(frozen=True)
class _CensusReplica:
    seq: DegreeSequence
    n: int
    grid: tuple[tuple[int, int], ...]
    seed: int

    def __call__(self, r: int) -> tuple[int, ...]:
        tracker = ComponentTracker()
        observe = tracker.observe_round
        wanted: dict[int, list[tuple[int, int]]] = {}
        for slot, (k, i) in enumerate(self.grid):
            wanted.setdefault(i, []).append((slot, k))
        out = [0] * (len(self.grid) + 1)
        bad = 0

        def observer(i, b, g):
            nonlocal bad
            observe(i, b)
            if tracker.components != tracker.zero_count:
                bad += 1
            if i in wanted:
                for slot, k in wanted[i]:
                    out[slot] = tracker.census.get(k, 0)

        grow(self.seq, self.n, ProcessRng(self.seed, r), [observer])
        out[-1] = bad
        return tuple(out)


def census_mc_check(seq: DegreeSequence, k_max: int, horizon: int, replicas: int, seed: int,
                    grid=None, workers: int = 1, time_budget_s: float | None = None) -> ExperimentReport:
    """Mean realised tree counts ``N(k)_i`` against the exact ``a(k)_i``.

    Also counts, over all rounds and replicas, how often the component count
    differed from the number of zero rounds (zero-one runs: never).
    """
    start = time.monotonic()
    grid = tuple(default_census_grid(horizon, k_max) if grid is None else grid)
    if any(k > k_max or not 0 <= i < horizon for k, i in grid):
        raise ValueError("census grid point outside k <= k_max, i < horizon")
    table = expectation_table(seq, k_max, horizon - 1)
    rows, complete = harness.run_replicas(_CensusReplica(seq, horizon, grid, seed), replicas, workers, time_budget_s)
    cols = columns(rows)
    report = ExperimentReport("census", seq.spec, horizon, replicas, seed)
    for (k, i), tally in zip(grid, cols):
        report.stats.append(harness.stat_equal(f"N({k})_{i}", tally, table(k, i)))
    violations = cols[-1] if cols else Tally()
    report.stats.append(harness.stat_equal("component-count != zero-count rounds", violations, Fraction(0)))
    report.details = {"component_law_violations": violations.total}
    return _finish(report, complete, len(rows), start)


# -- very sparse star regime -------------------------------------------------


def star_threshold(seq: DegreeSequence, horizon: int) -> int:
    """Least ``M >= 1`` with ``s_n d_n / n < 1/3`` for every ``n`` in ``[M, horizon)``."""
    led = ledger(seq, horizon - 1)
    last_bad = max((n for n in range(1, horizon) if 3 * led.s(n) * led.d(n) >= n), default=0)
    return last_bad + 1


def star_product_bound(seq: DegreeSequence, M: int, horizon: int) -> Fraction:
    """``prod_{n=M..horizon-1} (1 - 3 s_n / n) ** d_n``."""
    led = ledger(seq, horizon - 1)
    return exact_prod((1 - Fraction(3 * led.s(n), n)) ** led.d(n) for n in range(M, horizon) if led.d(n))


@dataclass(frozen=True)
class _StarReplica:
    seq: DegreeSequence
    n: int
    M: int
    seed: int

    def __call__(self, r: int) -> tuple[int, int]:
        tracker = ComponentTracker()
        size, find = tracker.size, tracker.find
        attached: list[int] = []
        event = True

        def observer(i, b, g):
            nonlocal event
            if b and i >= self.M:
                if all(size[find(u)] == 1 for u in b):
                    attached.append(i)
                else:
                    event = False
            tracker.observe_round(i, b)

        g = grow(self.seq, self.n, ProcessRng(self.seed, r), [observer])
        bad = 0
        if event:
            for v in attached:
                if tracker.is_star(v) != (True, len(g.birth_sets[v])):
                    bad += 1
        return int(event), bad


def star_regime_probe(seq: DegreeSequence, horizon: int, replicas: int, seed: int,
                      workers: int = 1, time_budget_s: float | None = None) -> ExperimentReport:
    """Chance that every late vertex attaches only to singletons, against the product bound."""
    if regime(seq) != "very-sparse":
        raise ValueError(f"{seq.spec} is not registered as very sparse (sum s_i d_i / i finite)")
    start = time.monotonic()
    M = star_threshold(seq, horizon)
    bound = star_product_bound(seq, M, horizon)
    rows, complete = harness.run_replicas(_StarReplica(seq, horizon, M, seed), replicas, workers, time_budget_s)
    event, bad = columns(rows)
    report = ExperimentReport("star", seq.spec, horizon, replicas, seed)
    report.stats = [
        harness.stat_at_least(f"Pr[rounds >= {M} attach to singletons]", event, bound),
        harness.stat_equal("late vertices not in a d_n-star", bad, Fraction(0)),
    ]
    report.details = {"M": M, "product_bound": fmt(bound), "product_bound_float": float(bound)}
    return _finish(report, complete, len(rows), start)


# -- rays --------------------------------------------------------------------


@dataclass(frozen=True)
class _RayReplica:
    seq: DegreeSequence
    n: int
    grid: tuple[tuple[int, int], ...]
    seed: int

    def __call__(self, r: int) -> tuple[int, ...]:
        g = grow(self.seq, self.n, ProcessRng(self.seed, r))
        return tuple(int(longest_new_path_probe(g, i, k)) for i, k in self.grid)


def ray_bound_check(seq: DegreeSequence, horizon: int, i_grid, k_grid, replicas: int, seed: int,
                    workers: int = 1, time_budget_s: float | None = None) -> ExperimentReport:
    """``Pr[E_k]`` from ``v_i`` against ``t_{i,horizon-1} ** k``."""
    start = time.monotonic()
    grid = tuple((i, k) for i in i_grid for k in k_grid)
    led = ledger(seq, horizon - 1)
    rows, complete = harness.run_replicas(_RayReplica(seq, horizon, grid, seed), replicas, workers, time_budget_s)
    report = ExperimentReport("ray", seq.spec, horizon, replicas, seed)
    for (i, k), tally in zip(grid, columns(rows)):
        report.stats.append(
            harness.stat_at_most(f"Pr[E_{k}] from v_{i}", tally, led.t(i, horizon - 1) ** k)
        )
    return _finish(report, complete, len(rows), start)


# -- double random process ---------------------------------------------------


@dataclass(frozen=True)
class _ChebyshevReplica:
    p: Fraction
    n_grid: tuple[int, ...]
    M: int
    seed: int

    def __call__(self, r: int) -> tuple[int, ...]:
        top = max(self.n_grid)
        d = Bernoulli(self.p, derive_seed(self.seed, r) & _MASK64).degree_array(top + 1)
        x = np.cumsum(d[1:] / np.arange(1, top + 1))
        out = []
        for n in self.n_grid:
            xn = float(x[n - 1])
            if abs(xn - self.M) < 1e-9:
                idx = np.flatnonzero(d[1 : n + 1]) + 1
                out.append(int(exact_sum(Fraction(1, int(i)) for i in idx) <= self.M))
            else:
                out.append(int(xn <= self.M))
        return tuple(out)


def chebyshev_tail_table(p: Fraction, n_grid, M: int, replicas: int, seed: int,
                         workers: int = 1, time_budget_s: float | None = None) -> ExperimentReport:
    """``Pr[X_n <= M]`` for ``X_n = sum_{i<=n} d_i / i`` with Bernoulli(p) degrees,
    against ``2 / (p ln n - M)**2``.  Rows with ``p ln n <= M`` are inapplicable.
    """
    p = Fraction(p)
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    start = time.monotonic()
    n_grid = tuple(n_grid)
    rows_out = []
    applicable = []
    for n in n_grid:
        gap = float(p) * math.log(n) - M
        if gap <= 0:
            rows_out.append({"n": n, "bound": None, "applicable": False})
        else:
            applicable.append(n)
            rows_out.append({"n": n, "bound": 2 / gap**2, "applicable": True})
    report = ExperimentReport("dbl-random", f"bernoulli:p={p}", max(n_grid), replicas, seed)
    complete, got = True, replicas
    if applicable:
        rows, complete = harness.run_replicas(
            _ChebyshevReplica(p, tuple(applicable), M, seed), replicas, workers, time_budget_s
        )
        got = len(rows)
        for n, tally in zip(applicable, columns(rows)):
            bound = 2 / (float(p) * math.log(n) - M) ** 2
            target = None
            if p == 1:
                # degenerate control: X_n is the harmonic number
                target = Fraction(int(exact_sum(Fraction(1, i) for i in range(1, n + 1)) <= M))
            report.stats.append(harness.stat_at_most(f"Pr[X_{n} <= {M}]", tally, bound, target))
            for row in rows_out:
                if row["n"] == n:
                    row["empirical"] = float(tally.mean)
                    row["se"] = tally.se
    report.details = {"p": fmt(p), "M": M, "rows": rows_out}
    return _finish(report, complete, got, start)


# -- degree growth -----------------------------------------------------------


@dataclass(frozen=True)
class _DegreeReplica:
    seq: DegreeSequence
    checkpoints: tuple[int, ...]
    tracked: tuple[int, ...]
    seed: int

    def __call__(self, r: int) -> tuple[int, ...]:
        g = grow(self.seq, max(self.checkpoints), ProcessRng(self.seed, r))
        adj = g.adjacency
        return tuple(bisect.bisect_left(adj[v], c) for v in self.tracked for c in self.checkpoints)


@dataclass(frozen=True)
class _TailHitReplica:
    seq: DegreeSequence
    n: int
    seed: int

    def __call__(self, r: int) -> tuple[int]:
        g = grow(self.seq, self.n, ProcessRng(self.seed, r))
        lo = (self.n - 1) // 2 + 1
        # birth sets are sorted, so v_0 can only appear first
        return (int(any(g.birth_sets[v][:1] == [0] for v in range(lo, self.n))),)


def degree_growth_probe(seq: DegreeSequence, checkpoints, replicas: int, seed: int,
                        workers: int = 1, time_budget_s: float | None = None) -> ExperimentReport:
    """Dense families: median degrees of v_0, v_1, v_2 grow across checkpoints
    (a finite proxy for infinite degree).  Sparse families: chance that v_0
    gains a neighbour in the second half of the run, against the exact
    no-hit product and its sandwich bound.
    """
    start = time.monotonic()
    checkpoints = tuple(sorted(checkpoints))
    reg = regime(seq)
    horizon = checkpoints[-1]
    report = ExperimentReport("degree-growth", seq.spec, horizon, replicas, seed)
    if reg == "dense":
        tracked = (0, 1, 2)
        rows, complete = harness.run_replicas(
            _DegreeReplica(seq, checkpoints, tracked, seed), replicas, workers, time_budget_s
        )
        cols = list(zip(*rows))
        medians = {}
        for slot, (v, c) in enumerate(itertools.product(tracked, checkpoints)):
            medians[(v, c)] = statistics.median(cols[slot])
        for v in tracked:
            for prev, c in zip(checkpoints, checkpoints[1:]):
                m0, m1 = medians[(v, prev)], medians[(v, c)]
                report.stats.append(
                    harness.Stat(f"median deg v_{v} at {c}", float(m1), 0.0, m1 > m0,
                                 bound=f"> {m0} (median at {prev})")
                )
        report.details = {
            "proxy": "monotone median degree growth stands in for infinite degree",
            "medians": {f"v{v}@{c}": float(m) for (v, c), m in medians.items()},
        }
        return _finish(report, complete, len(rows), start)
    if reg not in ("sparse", "very-sparse"):
        raise ValueError(f"{seq.spec} is not a registered dense or sparse family")
    lo = (horizon - 1) // 2 + 1
    low, exact, _ = no_hit_probability(seq, 1, max(lo, 1), horizon - 1)
    rows, complete = harness.run_replicas(_TailHitReplica(seq, horizon, seed), replicas, workers, time_budget_s)
    report.stats = [
        harness.stat_at_most(f"Pr[v_0 gains a neighbour in [{lo}, {horizon - 1}]]", columns(rows)[0], 1 - low)
    ]
    report.details = {"exact_hit_probability": fmt(1 - exact), "sandwich_bound": fmt(1 - low)}
    return _finish(report, complete, len(rows), start)


# -- plans -------------------------------------------------------------------


def _parse_p(value) -> Fraction:
    return Fraction(str(value))


def _run_triangle(plan, workers):
    return triangle_check(int(plan.params.get("rounds", 2)), plan.replicas or 10_000, plan.base_seed,
                          plan.horizon, workers, plan.time_budget_s)


def _run_witness(plan, workers):
    if "cases" in plan.params:
        cases = [tuple(c) for c in plan.params["cases"]]
        label = "grid"
    else:
        seq = parse_sequence(plan.seq or "const-frac:1/3")
        cases = witness_cases(seq, plan.params.get("n_grid", (10, 20, 40)), int(plan.params.get("k", 1)))
        label = seq.spec
    return witness_law_check(cases, plan.replicas or 100_000, plan.base_seed, workers, plan.time_budget_s, label)


def _run_census(plan, workers):
    seq = parse_sequence(plan.seq or "ones")
    return census_mc_check(seq, int(plan.params.get("k_max", 5)), plan.horizon or 1000,
                           plan.replicas or 10_000, plan.base_seed, plan.params.get("grid"),
                           workers, plan.time_budget_s)


def _run_star(plan, workers):
    seq = parse_sequence(plan.seq or "geometric:base=4")
    return star_regime_probe(seq, plan.horizon or 4**7, plan.replicas or 1000, plan.base_seed,
                             workers, plan.time_budget_s)


def _run_ray(plan, workers):
    seq = parse_sequence(plan.seq or "geometric:base=2")
    return ray_bound_check(seq, plan.horizon or 1000, plan.params.get("i_grid", (10, 50)),
                           plan.params.get("k_grid", (2, 3, 4)), plan.replicas or 10_000,
                           plan.base_seed, workers, plan.time_budget_s)


def _run_dbl_random(plan, workers):
    return chebyshev_tail_table(_parse_p(plan.params.get("p", "1/2")), plan.params.get("n_grid", (1000, 10_000)),
                                int(plan.params.get("M", 1)), plan.replicas or 10_000, plan.base_seed,
                                workers, plan.time_budget_s)


def _run_degree_growth(plan, workers):
    seq = parse_sequence(plan.seq or "ones")
    checkpoints = plan.params.get("checkpoints") or (
        (plan.horizon // 100, plan.horizon // 10, plan.horizon) if plan.horizon else (100, 1000, 10_000)
    )
    return degree_growth_probe(seq, checkpoints, plan.replicas or 200, plan.base_seed, workers,
                               plan.time_budget_s)


PRESETS: dict[str, Callable[[ExperimentPlan, int], ExperimentReport]] = {
    "triangle": _run_triangle,
    "witness": _run_witness,
    "census": _run_census,
    "star": _run_star,
    "ray": _run_ray,
    "dbl-random": _run_dbl_random,
    "degree-growth": _run_degree_growth,
}


def run(plan: ExperimentPlan, workers: int = 1) -> ExperimentReport:
    """Run a preset.  Raises :class:`BudgetExceeded` (carrying a partial,
    invalid report) if the plan's time budget runs out."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return PRESETS[plan.preset](plan, workers)
