"""Witness probabilities, the two radocity series, and per-family verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .engine import GrowthGraph
from .exact import exact_prod, exact_sum, fmt
from .sequence import (
    AllOnesAfterZero,
    Bernoulli,
    ConstFraction,
    DegreeSequence,
    GeometricOnes,
    PowerOnes,
    TriangleConstruction,
    ZeroOnePattern,
)

INF = math.inf


def falling_factorial(n: int, k: int) -> int:
    """``n (n-1) ... (n-k+1)``; 1 for ``k = 0`` and 0 once a factor hits zero."""
    if n < 0 or k < 0:
        raise ValueError(f"need n, k >= 0, got n={n}, k={k}")
    return math.perm(n, k)


def generalized_witness_probability(n: int, d: int, a: int, b: int) -> Fraction:
    """Chance that a uniform ``d``-subset of an ``n``-set contains a fixed
    ``a``-set and misses a disjoint fixed ``b``-set."""
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    if a < 0 or b < 0:
        raise ValueError("set sizes must be >= 0")
    if a + b > n or d < a or n - d < b:
        return Fraction(0)
    return Fraction(math.comb(n - a - b, d - a), math.comb(n, d))


def witness_probability(n: int, d: int, k: int) -> Fraction:
    """``(d)_k (n-d)_k / (n)_{2k}``: chance that v_n witnesses a pair of k-sets."""
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    if 2 * k > n:
        return Fraction(0)
    return Fraction(
        falling_factorial(d, k) * falling_factorial(n - d, k), falling_factorial(n, 2 * k)
    )


def combi_sandwich(n: int, d: int, m: int) -> tuple[Fraction, Fraction, Fraction]:
    """``(1 - m/(n-d))**d <= C(n-m, d) / C(n, d) <= (1 - m/n)**d``.

    Returns ``(lower, exact, upper)``.  Requires ``m <= n - d``.
    """
    if not (0 <= d <= n and 0 <= m and m <= n - d):
        raise ValueError(f"need 0 <= d <= n and m <= n - d (n={n}, d={d}, m={m})")
    exact = Fraction(math.comb(n - m, d), math.comb(n, d))
    lower = (1 - Fraction(m, n - d)) ** d if n > d else Fraction(int(m == 0))
    upper = (1 - Fraction(m, n)) ** d if n else Fraction(1)
    return lower, exact, upper


# -- radocity ----------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Registered radocity of a family: ``k`` is an int, ``math.inf``, or None."""

    k: float | int | None
    almost_sure: bool = False

    @property
    def known(self) -> bool:
        return self.k is not None

    def __str__(self) -> str:
        if self.k is None:
            return "diagnostics"
        return "known:inf" if self.k == INF else f"known:{self.k}"


def registered_radocity(seq: DegreeSequence) -> tuple[Verdict, str]:
    """Analytic radocity for registered families, with a one-line reason."""
    if isinstance(seq, ConstFraction):
        return Verdict(INF), "a_n = min(d_n, n - d_n)/n stays near min(alpha, 1 - alpha) > 0"
    if isinstance(seq, AllOnesAfterZero):
        return Verdict(1), "t=1 terms ~ 1/n diverge; (1)_(2) = 0 kills every t>=2 term"
    if isinstance(seq, ZeroOnePattern):
        if seq.periodic_ones:
            return Verdict(1), "periodic ones: t=1 series diverges like a harmonic series, t>=2 terms vanish"
        return Verdict(0), "finitely many ones: every series has finitely many nonzero terms"
    if isinstance(seq, TriangleConstruction):
        return Verdict(1), (
            "ones give a divergent t=1 series; at t=2 only the sparse 2's contribute, "
            "with terms ~ 2/k^2 at positions whose reciprocals are summable"
        )
    if isinstance(seq, Bernoulli):
        if seq.p == 1:
            return Verdict(1), "p=1 is the sequence 0,1,1,..."
        return Verdict(1, almost_sure=True), (
            "almost surely: sum d_i/i diverges (Chebyshev on its partial sums); "
            "zero-one degrees kill every t>=2 term"
        )
    if isinstance(seq, GeometricOnes):
        return Verdict(0), "ones at powers of the base: sum d_n/n is a geometric series"
    if isinstance(seq, PowerOnes):
        return Verdict(0), f"ones at m^{seq.exponent}: sum d_n/n converges"
    return Verdict(None), "explicit prefix: convergence cannot be decided from finitely many terms"


@dataclass
class RadocityReport:
    horizon: int
    # t -> (power-form partial sum, factorial-form partial sum)
    per_t: dict[int, tuple[Fraction, Fraction]]
    verdict: Verdict
    family_note: str

    def to_dict(self) -> dict:
        rows = []
        for t, (power, fact) in sorted(self.per_t.items()):
            rows.append(
                {
                    "t": t,
                    "power_form": fmt(power),
                    "factorial_form": fmt(fact),
                    "power_form_float": float(power),
                    "factorial_form_float": float(fact),
                }
            )
        note = self.family_note
        if self.verdict.almost_sure:
            note = "a.s. " + note
        return {
            "horizon": self.horizon,
            "per_t": rows,
            "verdict": str(self.verdict),
            "family_note": note,
        }


def power_term(n: int, d: int, t: int) -> Fraction:
    """``(d/n)**t ((n-d)/n)**t`` with ``0**0 = 1``."""
    return Fraction((d * (n - d)) ** t, n ** (2 * t))


def factorial_term(n: int, d: int, t: int) -> Fraction:
    """``(d)_t (n-d)_t / (n)_{2t}``, zero when the numerator vanishes."""
    num = falling_factorial(d, t) * falling_factorial(n - d, t)
    if num == 0:
        return Fraction(0)
    return Fraction(num, falling_factorial(n, 2 * t))


def radocity_series(seq: DegreeSequence, t_max: int, horizon: int) -> RadocityReport:
    """Exact partial sums over ``1 <= n <= horizon`` of both radocity series."""
    if t_max < 1 or horizon < 1:
        raise ValueError("t_max and horizon must be >= 1")
    degrees = seq.degrees(horizon + 1)
    per_t = {}
    for t in range(1, t_max + 1):
        power = exact_sum(power_term(n, degrees[n], t) for n in range(1, horizon + 1))
        fact = exact_sum(factorial_term(n, degrees[n], t) for n in range(1, horizon + 1))
        per_t[t] = (power, fact)
    verdict, note = registered_radocity(seq)
    return RadocityReport(horizon, per_t, verdict, note)


def term_equivalence_check(d: int, n: int, t: int) -> tuple[Fraction, Fraction, Fraction | None]:
    """Both n-th series terms and ``factorial / power`` when both are nonzero."""
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    first = power_term(n, d, t)
    second = factorial_term(n, d, t)
    ratio = second / first if first and second else None
    return first, second, ratio


def term_ratio_violations(n_max: int, t: int, chunk: int = 2_000_000) -> tuple[int, list]:
    """Check ``0 < factorial/power <= 4**t`` for every ``t <= d <= n - t``, ``n <= n_max``.

    The ratio equals ``prod_{i<t} (d-i)(n-d-i)/(d (n-d)) * prod_{i<2t} n/(n-i)``.
    Positivity is an integer check.  The upper bound is screened in float64:
    each of the ~8t roundings has relative error below 2**-53, so any value
    below ``4**t (1 - 1e-12)`` is certified; anything else is settled with
    exact rationals.  Returns ``(cases_checked, violations)``.
    """
    bound = 4**t
    ns = np.arange(2 * t, n_max + 1, dtype=np.int64)
    counts = ns - 2 * t + 1
    checked = 0
    violations = []
    starts = np.concatenate([[0], np.cumsum(counts)])
    lo = 0
    while lo < len(ns):
        hi = int(np.searchsorted(starts, starts[lo] + chunk, side="right")) - 1
        hi = max(hi, lo + 1)
        n_blk, c_blk = ns[lo:hi], counts[lo:hi]
        total = int(c_blk.sum())
        n = np.repeat(n_blk, c_blk)
        offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(c_blk) - c_blk, c_blk)
        d = t + offs
        m = n - d
        ratio = np.ones(total)
        positive = np.ones(total, dtype=bool)
        for i in range(t):
            positive &= (d - i > 0) & (m - i > 0)
            ratio *= (d - i) / d
            ratio *= (m - i) / m
        for i in range(2 * t):
            ratio *= n / (n - i)
        suspect = ~positive | ~(ratio <= bound * (1 - 1e-12))
        for k in np.flatnonzero(suspect):
            nn, dd = int(n[k]), int(d[k])
            _, _, r = term_equivalence_check(dd, nn, t)
            if r is None or not 0 < r <= bound:
                violations.append((nn, dd, t, r))
        checked += total
        lo = hi
    return checked, violations


# -- witnesses ---------------------------------------------------------------


@dataclass(frozen=True)
class WitnessQuery:
    A: frozenset[int]
    B: frozenset[int] = frozenset()
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "A", frozenset(self.A))
        object.__setattr__(self, "B", frozenset(self.B))
        if self.A & self.B:
            raise ValueError(f"A and B must be disjoint, share {sorted(self.A & self.B)}")
        if self.start < 0:
            raise ValueError("start must be >= 0")


def count_witnesses(g: GrowthGraph, q: WitnessQuery) -> int:
    """Vertices ``v >= q.start`` outside A and B, adjacent to all of A and none of B."""
    for v in q.A | q.B:
        if not 0 <= v < g.n:
            raise ValueError(f"query vertex {v} outside graph of size {g.n}")
    adj = g.adjacency
    if q.A:
        it = iter(q.A)
        cand = set(adj[next(it)])
        for a in it:
            cand.intersection_update(adj[a])
    else:
        cand = set(range(g.n))
    for b in q.B:
        cand.difference_update(adj[b])
    cand -= q.A | q.B
    return sum(1 for v in cand if v >= q.start)


def no_witness_tail_probability(seq: DegreeSequence, k: int, N: int, M: int) -> Fraction:
    """``prod_{n=N..M} (1 - p_n)`` with ``p_n`` the k-pair witness probability."""
    if N > M:
        raise ValueError(f"need N <= M, got {N} > {M}")
    degrees = seq.degrees(M + 1)
    return exact_prod(1 - witness_probability(n, degrees[n], k) for n in range(N, M + 1))


def no_hit_probability(seq: DegreeSequence, m: int, lo: int, hi: int) -> tuple[Fraction, Fraction, Fraction]:
    """Chance that a fixed set of ``m`` vertices, all older than ``lo``, gets no
    new neighbour in rounds ``lo..hi``.

    Returns ``(lower, exact, upper)`` where the bounds multiply the
    per-round sandwich of :func:`combi_sandwich`.
    """
    if lo > hi:
        return Fraction(1), Fraction(1), Fraction(1)
    if m > lo:
        raise ValueError(f"{m} vertices cannot all precede v_{lo}")
    degrees = seq.degrees(hi + 1)
    lows, exacts, ups = [], [], []
    for i in range(lo, hi + 1):
        d = degrees[i]
        if m > i - d:
            lows.append(Fraction(0))
            exacts.append(Fraction(0))
            ups.append((1 - Fraction(m, i)) ** d)
            continue
        low, ex, up = combi_sandwich(i, d, m)
        lows.append(low)
        exacts.append(ex)
        ups.append(up)
    return exact_prod(lows), exact_prod(exacts), exact_prod(ups)
