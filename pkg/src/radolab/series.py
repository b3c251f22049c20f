"""Index-tuple calculus: weights ``f(sigma)``, the families A, B, C, D, and
finite-truncation checks of the identities built from them.

``f(sigma)`` is the product of ``d_s / s`` over the entries of ``sigma``.
For tuples with entries at most ``M`` define (all with ``l`` entries):

* ``A(l, i)``: minimum entry equal to ``i``;
* ``B(l, i)``: strictly increasing members of A (``B(l, i, j)``: also max <= j);
* ``C(l, i)``: members of A with distinct entries;
* ``D(l, i)``: every entry at least ``i``.

Sums over families are accumulated as integers scaled by ``lcm(1..M)**l``
and divided once at the end, so they stay exact without per-term
normalisation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exact import exact_sum, fmt
from .sequence import DegreeSequence, SeriesLedger, ledger

TUPLE_BUDGET = 10**8


class EnumerationBudgetError(RuntimeError):
    """A family enumeration would exceed :data:`TUPLE_BUDGET` tuples."""


def f_weight(seq: DegreeSequence | SeriesLedger, sigma: Sequence[int]) -> Fraction:
    """``prod d_s / s`` over the entries of ``sigma``; the empty tuple weighs 1."""
    out = Fraction(1)
    for s in sigma:
        if s < 1:
            raise ValueError(f"tuple entries must be >= 1, got {s}")
        d = seq.d(s) if isinstance(seq, SeriesLedger) else seq.degree(s)
        if d == 0:
            return Fraction(0)
        out *= Fraction(d, s)
    return out


@dataclass(frozen=True)
class FamilySpec:
    family: str
    l: int
    i: int
    j: int | None = None

    def __post_init__(self):
        if self.family not in ("A", "B", "C", "D"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.l < 1 or self.i < 1:
            raise ValueError("need l >= 1 and i >= 1")
        if self.j is not None and self.j < self.i:
            raise ValueError(f"need j >= i, got j={self.j} < i={self.i}")

    def bound(self, max_bound: int) -> int:
        return max_bound if self.j is None else min(self.j, max_bound)

    def size(self, max_bound: int) -> int:
        """Member count with entries at most ``max_bound``."""
        l, i, m = self.l, self.i, self.bound(max_bound)
        if m < i:
            return 0
        span = m - i + 1
        if self.family == "D":
            return span**l
        if self.family == "A":
            return span**l - (span - 1) ** l
        if self.family == "B":
            return math.comb(span - 1, l - 1)
        # C: choose the other l-1 distinct values above i, then order all l
        return math.comb(span - 1, l - 1) * math.factorial(l)


def _min_exactly(i: int, values: Sequence[int], l: int) -> Iterator[tuple[int, ...]]:
    """Tuples over ``values`` (sorted, all >= i, containing i) whose minimum is i."""
    if l == 1:
        yield (i,)
        return
    higher = [v for v in values if v > i]
    for rest in itertools.product(values, repeat=l - 1):
        yield (i,) + rest
    for first in higher:
        for rest in _min_exactly(i, values, l - 1):
            yield (first,) + rest


def _members(family: str, l: int, i: int, values: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Family members with entries drawn from ``values``, lexicographically."""
    if family == "D":
        yield from itertools.product(values, repeat=l)
        return
    if not values or values[0] != i:
        return
    if family == "B":
        for rest in itertools.combinations(values[1:], l - 1):
            yield (i,) + rest
    elif family == "A":
        yield from _min_exactly(i, values, l)
    else:
        yield from (s for s in _min_exactly(i, values, l) if len(set(s)) == l)


def enumerate_family(spec: FamilySpec, max_bound: int) -> Iterator[tuple[int, ...]]:
    """Members of the family with entries <= ``max_bound``, in lexicographic order."""
    size = spec.size(max_bound)
    if size > TUPLE_BUDGET:
        raise EnumerationBudgetError(
            f"{spec.family}^{spec.l}_{spec.i} up to {max_bound} has {size} tuples "
            f"(budget {TUPLE_BUDGET})"
        )
    return _members(spec.family, spec.l, spec.i, range(spec.i, spec.bound(max_bound) + 1))


class _ScaledWeights:
    """Integer weights ``w_s = d_s * L / s`` with ``L = lcm(1..M)``.

    Tuples touching an index with ``d_s = 0`` weigh nothing, so sums only
    walk tuples over the support.
    """

    def __init__(self, led: SeriesLedger, M: int):
        self.M = M
        self.L = math.lcm(*range(1, M + 1)) if M >= 1 else 1
        self.w = [0] + [led.d(s) * (self.L // s) for s in range(1, M + 1)]

    def tuples(self, spec: FamilySpec) -> Iterator[tuple[int, ...]]:
        if spec.size(self.M) > TUPLE_BUDGET:
            raise EnumerationBudgetError(f"{spec} up to {self.M} exceeds the tuple budget")
        values = [v for v in range(spec.i, spec.bound(self.M) + 1) if self.w[v]]
        return _members(spec.family, spec.l, spec.i, values)

    def total(self, tuples, l: int) -> Fraction:
        w = self.w
        acc = 0
        if l == 1:
            for (a,) in tuples:
                acc += w[a]
        elif l == 2:
            for a, b in tuples:
                acc += w[a] * w[b]
        elif l == 3:
            for a, b, c in tuples:
                acc += w[a] * w[b] * w[c]
        else:
            for s in tuples:
                acc += math.prod(w[x] for x in s)
        return Fraction(acc, self.L**l)

    def family_sum(self, spec: FamilySpec, keep=None) -> Fraction:
        tuples = self.tuples(spec)
        if keep is not None:
            tuples = filter(keep, tuples)
        return self.total(tuples, spec.l)


def _ledger_for(seq, M: int) -> SeriesLedger:
    if isinstance(seq, SeriesLedger):
        if seq.horizon < M:
            raise ValueError(f"ledger horizon {seq.horizon} < {M}")
        return seq
    return ledger(seq, M)


def family_weight_sum(seq, spec: FamilySpec, max_bound: int) -> Fraction:
    """Sum of ``f`` over the enumerated family (entries <= ``max_bound``)."""
    led = _ledger_for(seq, max_bound)
    return _ScaledWeights(led, max_bound).family_sum(spec)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: Fraction
    rhs: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self) -> dict:
        return {"lhs": fmt(self.lhs), "rhs": fmt(self.rhs), "equal": self.equal}


def rearrangement_identity_check(seq, l: int, M: int) -> IdentityCheck:
    """``sum_{i<=M} d_i t_{i,M}**l`` against ``sum_{j<=M} s_j sum_{A(l,j)} f``.

    The left side comes straight from the ledger; the right side enumerates
    every tuple, so the two are independent evaluation orders.
    """
    if l < 1 or M < 1:
        raise ValueError("need l >= 1 and M >= 1")
    led = _ledger_for(seq, M)
    lhs = exact_sum(led.d(i) * led.t(i, M) ** l for i in range(1, M + 1))
    sw = _ScaledWeights(led, M)
    rhs = exact_sum(led.s(j) * sw.family_sum(FamilySpec("A", l, j)) for j in range(1, M + 1))
    return IdentityCheck(lhs, rhs)


def injectivity_defect_bound_check(seq, l: int, M: int) -> dict:
    """``sum_i s_i sum_{A(l,i) minus C(l,i)} f <= (l-1) C(l,2) sum_i (s_i/i)(d_i/i) t_{i,M}**(l-2)``.

    The derivation swaps ``(d_m/m)**2`` for ``(d_i/i)(d_m/m)`` when ``m > i``,
    which holds for zero-one sequences; the report only certifies those.
    """
    if l < 2:
        raise ValueError("need l >= 2")
    led = _ledger_for(seq, M)
    sw = _ScaledWeights(led, M)
    per_i = []
    violations = []
    for i in range(1, M + 1):
        lhs_i = led.s(i) * sw.family_sum(FamilySpec("A", l, i), keep=lambda t: len(set(t)) < l)
        rhs_i = (
            (l - 1) * math.comb(l, 2) * Fraction(led.s(i) * led.d(i), i * i) * led.t(i, M) ** (l - 2)
        )
        per_i.append((lhs_i, rhs_i))
    lhs = exact_sum(a for a, _ in per_i)
    rhs = exact_sum(b for _, b in per_i)
    if not lhs <= rhs:
        violations.append({"lhs": fmt(lhs), "rhs": fmt(rhs)})
    return {
        "l": l,
        "M": M,
        "lhs": fmt(lhs),
        "rhs": fmt(rhs),
        "holds": lhs <= rhs,
        "zero_one": all(d <= 1 for d in led.degrees[: M + 1]),
        "violations": violations,
    }
