"""Brute-force references, independent of the package internals."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction


def witness_fraction(n: int, d: int, a: int, b: int) -> Fraction:
    """Share of d-subsets of range(n) that contain {0..a-1} and miss {a..a+b-1}."""
    A, B = set(range(a)), set(range(a, a + b))
    subsets = list(itertools.combinations(range(n), d))
    good = sum(1 for s in subsets if A <= set(s) and not B & set(s))
    return Fraction(good, len(subsets))


def outcome_graphs(degrees):
    """Every equiprobable list of birth sets for a degree prefix."""
    choices = [itertools.combinations(range(i), d) for i, d in enumerate(degrees)]
    for births in itertools.product(*choices):
        yield [list(b) for b in births]


def triangles(births) -> int:
    edges = {(u, v) for v, b in enumerate(births) for u in b}
    n = len(births)
    return sum(
        1
        for x, y, z in itertools.combinations(range(n), 3)
        if (x, y) in edges and (x, z) in edges and (y, z) in edges
    )


def expected_tree_counts(max_len: int, k_max: int) -> dict[tuple[int, ...], list[Fraction]]:
    """Exact ``E[N(k)_i]`` for every zero-one prefix up to ``max_len`` vertices.

    Walks all outcomes of all prefixes at once.  Key: the prefix (length
    i + 1); value: expected counts of size-1..k_max components on v_0..v_i.
    Weights are integers scaled by ``(max_len - 1)!``.
    """
    scale = math.factorial(max_len - 1)
    acc: dict[tuple[int, ...], Counter] = {}

    def walk(bits, label, sizes, weight):
        counts = acc.setdefault(tuple(bits), Counter())
        for s in sizes.values():
            if s <= k_max:
                counts[s] += weight
        if len(bits) == max_len:
            return
        n = len(bits)
        # zero round: a new singleton
        fresh = max(sizes, default=-1) + 1
        walk(bits + [0], label + [fresh], {**sizes, fresh: 1}, weight)
        # one round: join one of the n earlier vertices
        for u in range(n):
            c = label[u]
            walk(bits + [1], label + [c], {**sizes, c: sizes[c] + 1}, weight // n)

    walk([0], [0], {0: 1}, scale)
    return {
        key: [Fraction(counts[k], scale) for k in range(1, k_max + 1)]
        for key, counts in acc.items()
    }


def path_exists(births, i: int, k: int) -> bool:
    """Path with k edges from v_i through distinct vertices above i."""
    n = len(births)
    adj = {v: set() for v in range(n)}
    for v, b in enumerate(births):
        for u in b:
            adj[u].add(v)
            adj[v].add(u)
    others = [v for v in range(n) if v > i]
    for path in itertools.permutations(others, k):
        seq = (i,) + path
        if all(seq[j + 1] in adj[seq[j]] for j in range(k)):
            return True
    return k == 0
