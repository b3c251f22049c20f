"""Small helpers for exact rational bookkeeping."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


def exact_sum(terms: Iterable[Fraction | int]) -> Fraction:
    """Sum rationals by pairwise reduction.

    Sequential ``sum`` keeps a running total whose denominator is the lcm of
    everything seen so far; pairing keeps most additions small.
    """
    level = [Fraction(x) for x in terms if x]
    if not level:
        return Fraction(0)
    while len(level) > 1:
        nxt = [level[k] + level[k + 1] for k in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def exact_prod(factors: Iterable[Fraction | int]) -> Fraction:
    level = [Fraction(x) for x in factors]
    if not level:
        return Fraction(1)
    while len(level) > 1:
        nxt = [level[k] * level[k + 1] for k in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def fmt(q: Fraction | int) -> str:
    """``"num/den"`` form used in JSON reports."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse(text: str) -> Fraction:
    return Fraction(text)
