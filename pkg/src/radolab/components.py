"""Component analytics: incremental tree census, stars, paths, and the
expected tree-count recursion for zero-one sequences."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .engine import GrowthGraph
from .exact import exact_prod, exact_sum, fmt
from .sequence import (
    DegreeSequence,
    GeometricOnes,
    PowerOnes,
    ZeroOnePattern,
    ledger,
    regime,
)


class ComponentTracker:
    """Union-find over a growing graph, fed one round at a time.

    Per root it keeps size, edge count and maximum degree, which is enough to
    tell trees (``edges == size - 1``) and stars apart.  ``census[m]`` counts
    tree components of size ``m``.  Use the tracker directly as a
    :func:`~radolab.engine.grow` observer.
    """

    def __init__(self):
        self.parent: list[int] = []
        self.size: list[int] = []
        self.edges: list[int] = []
        self.max_degree: list[int] = []
        self.degree: list[int] = []
        self.census: dict[int, int] = {}
        self.zero_count = 0
        self.components = 0

    @property
    def n(self) -> int:
        return len(self.parent)

    def __call__(self, i: int, birth_set: list[int], graph: GrowthGraph | None = None) -> None:
        self.observe_round(i, birth_set)

    def find(self, v: int) -> int:
        parent = self.parent
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def observe_round(self, i: int, birth_set: list[int]) -> None:
        if i != len(self.parent):
            raise ValueError(f"round {i} observed out of order (expected {len(self.parent)})")
        parent, size, edges, maxdeg, degree = (
            self.parent, self.size, self.edges, self.max_degree, self.degree
        )
        census = self.census
        d = len(birth_set)
        parent.append(i)
        size.append(1)
        edges.append(0)
        degree.append(d)
        maxdeg.append(d)
        census[1] = census.get(1, 0) + 1
        self.components += 1
        if d == 0:
            self.zero_count += 1
            return
        find = self.find
        for u in birth_set:
            degree[u] += 1
            ru, ri = find(u), find(i)
            if ru == ri:
                if edges[ri] == size[ri] - 1:
                    census[size[ri]] -= 1
                edges[ri] += 1
                if degree[u] > maxdeg[ri]:
                    maxdeg[ri] = degree[u]
                continue
            for r in (ru, ri):
                if edges[r] == size[r] - 1:
                    census[size[r]] -= 1
            if size[ru] < size[ri]:
                ru, ri = ri, ru
            parent[ri] = ru
            size[ru] += size[ri]
            edges[ru] += edges[ri] + 1
            maxdeg[ru] = max(maxdeg[ru], maxdeg[ri], degree[u])
            self.components -= 1
            if edges[ru] == size[ru] - 1:
                census[size[ru]] = census.get(size[ru], 0) + 1

    def tree_count(self, m: int) -> int:
        return self.census.get(m, 0)

    def is_tree(self, v: int) -> bool:
        r = self.find(v)
        return self.edges[r] == self.size[r] - 1

    def is_star(self, v: int) -> tuple[bool, int | None]:
        """``(True, l)`` when v's component is ``K_{1,l}`` (a singleton is a 0-star)."""
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} not in tracker of size {self.n}")
        r = self.find(v)
        s = self.size[r]
        if self.edges[r] == s - 1 and (s <= 2 or self.max_degree[r] == s - 1):
            return True, s - 1
        return False, None

    def roots(self) -> list[int]:
        return [v for v in range(self.n) if self.parent[v] == v]

    def star_census(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for r in self.roots():
            ok, l = self.is_star(r)
            if ok:
                out[l] = out.get(l, 0) + 1
        return dict(sorted(out.items()))

    def census_report(self) -> dict:
        """JSON-ready census: tree counts by size, zero rounds, stars by leaf count."""
        return {
            "horizon": self.n,
            "census": {str(m): c for m, c in sorted(self.census.items()) if c},
            "zero_count": self.zero_count,
            "stars": {str(l): c for l, c in self.star_census().items()},
        }


def track(g: GrowthGraph) -> ComponentTracker:
    """Replay a finished graph through a fresh tracker."""
    tr = ComponentTracker()
    for i, b in enumerate(g.birth_sets):
        tr.observe_round(i, b)
    return tr


def bfs_census(g: GrowthGraph, upto: int | None = None) -> tuple[dict[int, int], int]:
    """From-scratch ``(tree census, component count)`` of the subgraph on ``0..upto-1``."""
    n = g.n if upto is None else upto
    adj = [[u for u in nb if u < n] for nb in g.adjacency[:n]]
    seen = [False] * n
    census: dict[int, int] = {}
    comps = 0
    for s in range(n):
        if seen[s]:
            continue
        comps += 1
        seen[s] = True
        queue = deque([s])
        size = deg_sum = 0
        while queue:
            v = queue.popleft()
            size += 1
            deg_sum += len(adj[v])
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
        if deg_sum // 2 == size - 1:
            census[size] = census.get(size, 0) + 1
    return census, comps


# -- expected tree counts ----------------------------------------------------


def _require_zero_one(degrees: list[int]) -> None:
    bad = next((i for i, d in enumerate(degrees) if d > 1), None)
    if bad is not None:
        raise ValueError(f"zero-one sequence required, but d_{bad} = {degrees[bad]}")


@dataclass(frozen=True)
class ExpectationTable:
    """``a[k-1][i]`` is the expected number of size-k trees on ``v_0..v_i``."""

    a: tuple[tuple[Fraction, ...], ...]

    @property
    def k_max(self) -> int:
        return len(self.a)

    @property
    def horizon(self) -> int:
        return len(self.a[0]) - 1

    def __call__(self, k: int, i: int) -> Fraction:
        if not 1 <= k <= self.k_max:
            raise ValueError(f"k={k} outside 1..{self.k_max}")
        return self.a[k - 1][i]


def expectation_table(seq: DegreeSequence, k_max: int, horizon: int) -> ExpectationTable:
    """Exact expected tree counts for a zero-one sequence.

    For ``k >= 2`` a one-round at ``i`` grows a tree of size ``k-1`` into one
    of size ``k`` with chance ``(k-1) a(k-1)/i`` and destroys a size-k tree
    with chance ``k a(k)/i``.  Singletons gain one per zero-round and lose
    ``a(1)/i`` in expectation per one-round.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    degrees = seq.degrees(horizon + 1)
    _require_zero_one(degrees)
    rows = [[Fraction(0)] * (horizon + 1) for _ in range(k_max)]
    rows[0][0] = Fraction(1)
    for i in range(1, horizon + 1):
        d = degrees[i]
        prev = [row[i - 1] for row in rows]
        if d == 0:
            rows[0][i] = prev[0] + 1
            for k in range(2, k_max + 1):
                rows[k - 1][i] = prev[k - 1]
            continue
        rows[0][i] = prev[0] * (1 - Fraction(1, i))
        for k in range(2, k_max + 1):
            rows[k - 1][i] = prev[k - 1] + ((k - 1) * prev[k - 2] - k * prev[k - 1]) / i
    return ExpectationTable(tuple(tuple(r) for r in rows))


def recursion_bounds_check(table: ExpectationTable, seq: DegreeSequence, horizon: int | None = None) -> dict:
    """Check the two-sided comparison bounds on the table, with explicit constants.

    For each ``k >= 2`` and ``i <= horizon`` (truncation ``M = horizon``):

    * ``Q_k S_k(i) <= a(k)_i <= k S_1(i)``, where ``S_lo`` sums
      ``a(k-1)_{j-1} d_j / j`` from ``j = k`` (resp. ``j = 1``) and
      ``Q_k = prod_{l=k+1..M} (1 - k d_l / l)``;
    * ``a(k)_i <= k! sum_{j<=i} d_j t_{j+1,M}**(k-2)``;
    * with ``N`` the least index >= 2 such that ``2 s_n / n <= 1/2`` on
      ``[N, M]``: ``a(2)_i >= (Q_2/2) s_{N,i}`` and, for ``k >= 3``,
      ``a(k)_i >= C_k sum_j s_{N,j-1} sum_{B^{k-2}_{j,i}} f`` with
      ``C_k = Q_k C_{k-1}``.

    Returns a report whose ``violations`` list must be empty.
    """
    M = table.horizon if horizon is None else horizon
    if M > table.horizon:
        raise ValueError(f"horizon {M} beyond table horizon {table.horizon}")
    led = ledger(seq, M)
    degrees = list(led.degrees)
    _require_zero_one(degrees)
    x = [Fraction(0)] + [Fraction(degrees[j], j) for j in range(1, M + 1)]
    tail = [led.t(j + 1, M) if j + 1 <= M else Fraction(0) for j in range(M + 1)]

    last_bad = max((n for n in range(1, M + 1) if 4 * led.s(n) > n), default=0)
    n_anchor = max(2, last_bad + 1) if last_bad < M else None
    violations: list[dict] = []
    constants: dict[str, str] = {}
    lower_c = None
    for k in range(2, table.k_max + 1):
        Q = exact_prod(1 - k * x[l] for l in range(k + 1, M + 1))
        constants[f"Q_{k}"] = fmt(Q)
        K = math.factorial(k)
        upper_sum = Fraction(0)
        lower_sum = Fraction(0)
        upbd = Fraction(0)
        for i in range(0, M + 1):
            a = table(k, i)
            if i >= 1:
                step = table(k - 1, i - 1) * x[i]
                upper_sum += step
                if i >= k:
                    lower_sum += step
                upbd += degrees[i] * tail[i] ** (k - 2)
            checks = [
                ("recursion-upper", a <= k * upper_sum),
                ("recursion-lower", Q * lower_sum <= a),
                ("upbd", a <= K * upbd),
            ]
            for name, ok in checks:
                if not ok:
                    violations.append({"k": k, "i": i, "bound": name})
        if n_anchor is None:
            continue
        # lower-tree bounds, anchored at n_anchor
        s_N = [led.s_window(n_anchor, j) for j in range(M + 1)]
        if k == 2:
            lower_c = Q / 2
            for i in range(M + 1):
                if not table(2, i) >= lower_c * s_N[i]:
                    violations.append({"k": 2, "i": i, "bound": "lowertrees"})
        else:
            lower_c = Q * lower_c
            # w[m][i] = sum_j s_{N,j-1} x_j e_m(x_{j+1..i})
            levels = k - 2
            w = [[Fraction(0)] * (M + 1) for _ in range(levels)]
            for i in range(1, M + 1):
                w[0][i] = w[0][i - 1] + (s_N[i - 1] * x[i] if i >= 1 else 0)
                for m in range(1, levels):
                    w[m][i] = w[m][i - 1] + x[i] * w[m - 1][i - 1]
            for i in range(M + 1):
                if not table(k, i) >= lower_c * w[levels - 1][i]:
                    violations.append({"k": k, "i": i, "bound": "lowertrees"})
        constants[f"C_{k}"] = fmt(lower_c)
    return {
        "horizon": M,
        "anchor_N": n_anchor,
        "constants": constants,
        "violations": violations,
    }


# -- paths -------------------------------------------------------------------


def longest_new_path_probe(g: GrowthGraph, i: int, k: int) -> bool:
    """Is there a path with ``k`` edges starting at ``v_i`` whose other vertices all exceed ``i``?"""
    if not 0 <= i < g.n:
        raise ValueError(f"start {i} outside graph of size {g.n}")
    if k <= 0:
        return True
    adj = g.adjacency
    on_path = {i}

    def extend(v: int, left: int) -> bool:
        for u in adj[v]:
            if u > i and u not in on_path:
                if left == 1:
                    return True
                on_path.add(u)
                if extend(u, left - 1):
                    return True
                on_path.discard(u)
        return False

    return extend(i, k)


# -- zero-one atom threshold -------------------------------------------------


def analytic_atom_threshold(seq: DegreeSequence) -> tuple[float | int | None, str]:
    """Least ``kappa >= 2`` with ``sum_l d_l t_{l+1}**(kappa-2)`` finite, for registered families.

    ``("dense", ...)`` families have no threshold: their atom is a union of
    omega-trees.  Returns ``(k, note)``; ``k`` is None when not registered or dense.
    """
    if isinstance(seq, GeometricOnes):
        # t_{b^j + 1} = b^{-j} / (b - 1): summable, while sum d_l itself diverges
        return 3, "ones at powers of the base: tails decay geometrically"
    if isinstance(seq, PowerOnes):
        q = seq.exponent
        # t_{m^q + 1} ~ m^{1-q}/(q-1); need (q-1)(kappa-2) > 1
        return 3 + 1 // (q - 1), f"tails ~ m^{1 - q} at ones m^{q}"
    if isinstance(seq, ZeroOnePattern) and not seq.periodic_ones:
        return 2, "finitely many ones: sum d_l is finite (violates the infinitely-many-ones assumption)"
    if regime(seq) == "dense":
        return None, "dense: sum d_i/i diverges, components are omega-trees"
    return None, "not a registered family: diagnostics only"


def zero_one_atom_threshold(seq: DegreeSequence, horizon: int, k_probe_max: int) -> dict:
    """Truncated sums ``sum_{1<=l<=horizon} d_l t_{l+1,horizon}**(kappa-2)`` for ``kappa = 2..k_probe_max``."""
    led = ledger(seq, horizon)
    _require_zero_one(list(led.degrees))
    tails = {l: led.t(l + 1, horizon) for l in range(1, horizon + 1) if led.d(l)}
    sums = {}
    for kappa in range(2, k_probe_max + 1):
        # 0**0 = 1 at kappa = 2
        sums[kappa] = exact_sum(tails[l] ** (kappa - 2) for l in tails) if kappa > 2 else Fraction(len(tails))
    k, note = analytic_atom_threshold(seq)
    flags = []
    if isinstance(seq, ZeroOnePattern) and not seq.periodic_ones:
        flags.append("finitely many ones")
    return {
        "horizon": horizon,
        "truncation": horizon,
        "partial_sums": {str(kp): fmt(v) for kp, v in sums.items()},
        "partial_sums_float": {str(kp): float(v) for kp, v in sums.items()},
        "regime": regime(seq),
        "threshold": None if k is None else k,
        "note": note,
        "flags": flags,
    }


def destruction_survival(seq: DegreeSequence, m: int, i: int, M: int) -> Fraction:
    """``prod_{j=i+1..M} (1 - d_j m / j)``: chance a fresh size-m tree at round i is never hit."""
    degrees = seq.degrees(M + 1)
    return exact_prod(1 - Fraction(degrees[j] * m, j) for j in range(i + 1, M + 1))
