"""The growth process: round i attaches v_i to a uniform d_i-subset of earlier vertices."""

from __future__ import annotations

import bisect
import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .sequence import MAX_INDEX, DegreeSequence, SequenceError

# d/i at or above this uses a dense swap array instead of a sparse swap map.
DENSE_THRESHOLD = 1 / 64

Observer = Callable[[int, list, "GrowthGraph"], None]


def derive_seed(seed: int, *key: int) -> int:
    """A 128-bit integer seed derived from ``seed`` and a spawn key."""
    words = np.random.SeedSequence(seed, spawn_key=key).generate_state(4, np.uint32)
    return int.from_bytes(words.tobytes(), "little")


@dataclass
class ProcessRng:
    """Random source for one growth run, keyed by ``(seed, stream)``."""

    seed: int
    stream: int = 0
    random: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        self.random = random.Random(derive_seed(self.seed, self.stream))
        self._bits = self.random.getrandbits

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection on ``bit_length(n)`` bits."""
        k = n.bit_length()
        x = self._bits(k)
        while x >= n:
            x = self._bits(k)
        return x


def sample_uniform_subset(rng: ProcessRng, i: int, d: int) -> list[int]:
    """A uniformly random ``d``-subset of ``range(i)``, sorted.

    Partial Fisher-Yates on an implicit ``range(i)``: a swap dictionary when
    ``d`` is small next to ``i``, an explicit array otherwise.
    """
    if not 0 <= d <= i:
        raise ValueError(f"cannot draw {d} of {i} elements")
    if d == 0:
        return []
    below = rng.below
    if d == 1:
        return [below(i)]
    if d >= i * DENSE_THRESHOLD:
        pool = list(range(i))
        for j in range(d):
            r = j + below(i - j)
            pool[j], pool[r] = pool[r], pool[j]
        out = pool[:d]
    else:
        swaps: dict[int, int] = {}
        out = []
        for j in range(d):
            r = j + below(i - j)
            out.append(swaps.get(r, r))
            swaps[r] = swaps.get(j, j)
    out.sort()
    return out


class GrowthGraph:
    """A realised graph, stored as the birth set of each vertex.

    ``birth_sets[i]`` holds the earlier vertices that v_i attached to in its
    own round.  Adjacency lists are derived on first use.
    """

    def __init__(self, birth_sets: Iterable[Sequence[int]] = (), seed: int = 0):
        self.birth_sets: list[list[int]] = [sorted(b) for b in birth_sets]
        self.seed = seed
        self._adjacency: list[list[int]] | None = None

    @property
    def n(self) -> int:
        return len(self.birth_sets)

    @property
    def adjacency(self) -> list[list[int]]:
        if self._adjacency is None:
            adj: list[list[int]] = [list(b) for b in self.birth_sets]
            for v, b in enumerate(self.birth_sets):
                for u in b:
                    adj[u].append(v)
            for a in adj:
                a.sort()
            self._adjacency = adj
        return self._adjacency

    def neighbors(self, v: int) -> list[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        lo, hi = min(u, v), max(u, v)
        b = self.birth_sets[hi]
        k = bisect.bisect_left(b, lo)
        return k < len(b) and b[k] == lo

    def edges(self) -> Iterable[tuple[int, int]]:
        for v, b in enumerate(self.birth_sets):
            for u in b:
                yield u, v

    @property
    def edge_count(self) -> int:
        return sum(len(b) for b in self.birth_sets)

    def validate(self, seq: DegreeSequence | None = None) -> None:
        """Raise ``AssertionError`` if any structural invariant fails."""
        for v, b in enumerate(self.birth_sets):
            assert all(0 <= u < v for u in b), f"birth set of {v} not below {v}: {b}"
            assert len(set(b)) == len(b), f"duplicate in birth set of {v}"
            assert list(b) == sorted(b)
            if seq is not None:
                assert len(b) == seq.degree(v), f"|birth_set[{v}]| != d_{v}"
        adj = self.adjacency
        for v, nb in enumerate(adj):
            assert v not in nb, f"self-loop at {v}"
            for u in nb:
                assert v in adj[u], f"asymmetric edge {u}-{v}"

    # -- dump format -------------------------------------------------------

    def dump(self) -> str:
        lines = [f"n={self.n} seed={self.seed}"]
        for v, b in enumerate(self.birth_sets):
            lines.append(f"{v}:" + "".join(f" {u}" for u in b))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dump(cls, text: str) -> GrowthGraph:
        lines = text.strip("\n").split("\n")
        header = dict(part.split("=", 1) for part in lines[0].split())
        n, seed = int(header["n"]), int(header["seed"])
        births = []
        for expect, line in enumerate(lines[1:]):
            idx, _, rest = line.partition(":")
            if int(idx) != expect:
                raise ValueError(f"dump line for vertex {idx} out of order (expected {expect})")
            births.append([int(u) for u in rest.split()])
        if len(births) != n:
            raise ValueError(f"dump declares n={n} but lists {len(births)} vertices")
        return cls(births, seed=seed)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrowthGraph):
            return NotImplemented
        return self.seed == other.seed and self.birth_sets == other.birth_sets


def grow(
    seq: DegreeSequence,
    n: int,
    rng: ProcessRng,
    observers: Sequence[Observer] = (),
) -> GrowthGraph:
    """Run rounds ``0..n-1`` of the process driven by ``seq``.

    Each observer is called as ``observer(i, birth_set, graph)`` after round
    ``i`` is committed.  Observers must not mutate the graph.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_INDEX:
        raise SequenceError(f"n={n} exceeds the {MAX_INDEX} vertex limit")
    degrees = seq.degrees(n)
    g = GrowthGraph(seed=rng.seed)
    births = g.birth_sets
    below = rng.below
    for i, d in enumerate(degrees):
        if d == 0:
            b = []
        elif d == 1:
            b = [below(i)]
        else:
            b = sample_uniform_subset(rng, i, d)
        births.append(b)
        if observers:
            g._adjacency = None
            for obs in observers:
                obs(i, b, g)
    g._adjacency = None
    return g


def count_triangles(g: GrowthGraph) -> int:
    """Number of vertex triples spanning three edges."""
    births = [set(b) for b in g.birth_sets]
    total = 0
    for b in births:
        if len(b) < 2:
            continue
        for u in b:
            total += len(b & births[u])
    return total


def triangles_closed_at(g: GrowthGraph, i: int) -> int:
    """Triangles whose newest vertex is ``v_i``: adjacent pairs inside its birth set."""
    b = g.birth_sets[i]
    return sum(1 for u, w in itertools.combinations(b, 2) if u in g.birth_sets[w])


def uniformity_chi_square(rng: ProcessRng, i: int, d: int, draws: int) -> tuple[float, float]:
    """Chi-square goodness of fit of ``draws`` samples against the uniform subset law.

    Returns ``(statistic, p_value)``.
    """
    from scipy.stats import chisquare

    index = {c: k for k, c in enumerate(itertools.combinations(range(i), d))}
    counts = np.zeros(len(index), dtype=np.int64)
    for _ in range(draws):
        counts[index[tuple(sample_uniform_subset(rng, i, d))]] += 1
    res = chisquare(counts)
    return float(res.statistic), float(res.pvalue)
