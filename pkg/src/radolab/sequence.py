"""Degree sequences that drive the growth process, and their exact ledgers.

A degree sequence assigns to every round ``i`` an integer ``d_i`` with
``0 <= d_i <= i``.  Families are small frozen dataclasses; anything that needs
the whole prefix at once goes through :meth:`DegreeSequence.degrees`, which is
vectorised for the random family.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

# Vertices are indexed by unsigned 32-bit integers in the engine.
MAX_INDEX = 2**32

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SequenceError(ValueError):
    """Invalid degree sequence or out-of-range query."""


class SequenceSpecError(SequenceError):
    """Malformed sequence spec string."""

    def __init__(self, message: str, token: str, position: int):
        super().__init__(f"{message}: {token!r} at position {position}")
        self.token = token
        self.position = position


class DegreeSequence:
    """Base class.  Subclasses implement :meth:`degree` and :attr:`spec`."""

    kind = "abstract"
    #: every d_i is 0 or 1
    zero_one = False
    #: number of defined indices, ``None`` when defined for all i >= 0
    length: int | None = None

    def degree(self, i: int) -> int:
        raise NotImplementedError

    def degrees(self, n: int) -> list[int]:
        """Return ``[d_0, ..., d_{n-1}]``."""
        self._check_range(n - 1)
        return [self.degree(i) for i in range(n)]

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def _check_range(self, i: int) -> None:
        if i < -1:
            raise SequenceError(f"negative index {i}")
        if self.length is not None and i >= self.length:
            raise SequenceError(
                f"index {i} beyond the {self.length} defined terms of {self.spec}"
            )

    def __str__(self) -> str:
        return self.spec


def _check_term(i: int, d: int) -> None:
    if not 0 <= d <= i:
        raise SequenceError(f"d_{i} = {d} violates 0 <= d_i <= i")


@dataclass(frozen=True)
class Explicit(DegreeSequence):
    values: tuple[int, ...]

    kind = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if not self.values:
            raise SequenceError("explicit sequence needs at least d_0")
        for i, d in enumerate(self.values):
            _check_term(i, d)

    @property
    def length(self) -> int:  # type: ignore[override]
        return len(self.values)

    @property
    def zero_one(self) -> bool:  # type: ignore[override]
        return all(d <= 1 for d in self.values)

    def degree(self, i: int) -> int:
        self._check_range(i)
        return self.values[i]

    def degrees(self, n: int) -> list[int]:
        self._check_range(n - 1)
        return list(self.values[:n])

    @property
    def spec(self) -> str:
        return "explicit:" + ",".join(map(str, self.values))


@dataclass(frozen=True)
class ConstFraction(DegreeSequence):
    """``d_i = floor(alpha * i)``."""

    alpha: Fraction

    kind = "const-frac"

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        if not 0 < alpha < 1:
            raise SequenceError(f"alpha must lie in (0, 1), got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    def degree(self, i: int) -> int:
        self._check_range(i)
        return (self.alpha.numerator * i) // self.alpha.denominator

    def degrees(self, n: int) -> list[int]:
        a, b = self.alpha.numerator, self.alpha.denominator
        return [(a * i) // b for i in range(n)]

    @property
    def spec(self) -> str:
        return f"const-frac:{self.alpha}"


@dataclass(frozen=True)
class ZeroOnePattern(DegreeSequence):
    """A finite 0/1 prefix followed by a periodic 0/1 pattern."""

    pattern: tuple[int, ...]
    prefix: tuple[int, ...] = ()

    kind = "zero-one"
    zero_one = True

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(int(b) for b in self.pattern))
        object.__setattr__(self, "prefix", tuple(int(b) for b in self.prefix))
        if not self.pattern:
            raise SequenceError("zero-one pattern must be non-empty")
        if any(b not in (0, 1) for b in self.pattern + self.prefix):
            raise SequenceError("zero-one pattern and prefix must be bits")
        _check_term(0, self.degree(0))

    @property
    def periodic_ones(self) -> bool:
        """Whether infinitely many terms equal 1."""
        return 1 in self.pattern

    def degree(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.pattern[(i - len(self.prefix)) % len(self.pattern)]

    def degrees(self, n: int) -> list[int]:
        return [self.degree(i) for i in range(n)]

    @property
    def spec(self) -> str:
        bits = "".join(map(str, self.pattern))
        if self.prefix:
            return f"zero-one:prefix={''.join(map(str, self.prefix))},pattern={bits}"
        return f"zero-one:pattern={bits}"


@dataclass(frozen=True)
class AllOnesAfterZero(DegreeSequence):
    """The sequence 0, 1, 1, 1, ..."""

    kind = "ones"
    zero_one = True

    def degree(self, i: int) -> int:
        self._check_range(i)
        return 0 if i == 0 else 1

    def degrees(self, n: int) -> list[int]:
        return [0] + [1] * (n - 1) if n > 0 else []

    @property
    def spec(self) -> str:
        return "ones"


@dataclass(frozen=True)
class GeometricOnes(DegreeSequence):
    """``d_i = 1`` exactly when ``i`` is a power of ``base`` (1, b, b^2, ...)."""

    base: int

    kind = "geometric"
    zero_one = True

    def __post_init__(self):
        if self.base < 2:
            raise SequenceError(f"geometric base must be >= 2, got {self.base}")

    def degree(self, i: int) -> int:
        self._check_range(i)
        if i < 1:
            return 0
        while i % self.base == 0:
            i //= self.base
        return int(i == 1)

    def degrees(self, n: int) -> list[int]:
        out = [0] * n
        p = 1
        while p < n:
            out[p] = 1
            p *= self.base
        return out

    @property
    def spec(self) -> str:
        return f"geometric:base={self.base}"


@dataclass(frozen=True)
class PowerOnes(DegreeSequence):
    """``d_i = 1`` exactly when ``i = m**exponent`` for some ``m >= 1``."""

    exponent: int

    kind = "powers"
    zero_one = True

    def __post_init__(self):
        if self.exponent < 2:
            raise SequenceError(f"exponent must be >= 2, got {self.exponent}")

    def degree(self, i: int) -> int:
        self._check_range(i)
        if i < 1:
            return 0
        m = round(i ** (1 / self.exponent))
        return int(any((m + e) ** self.exponent == i for e in (-1, 0, 1)))

    def degrees(self, n: int) -> list[int]:
        out = [0] * n
        m = 1
        while m**self.exponent < n:
            out[m**self.exponent] = 1
            m += 1
        return out

    @property
    def spec(self) -> str:
        return f"powers:q={self.exponent}"


@dataclass(frozen=True)
class TriangleConstruction(DegreeSequence):
    """Mostly ones, with 2's inserted at ``two_positions``.

    ``probabilities[l]`` is the exact chance that the l-th 2 closes a
    triangle.  Terms past the last 2 are 1.
    """

    two_positions: tuple[int, ...]
    probabilities: tuple[Fraction, ...]

    kind = "triangle"

    @cached_property
    def _twos(self) -> frozenset[int]:
        return frozenset(self.two_positions)

    @property
    def rounds(self) -> int:
        return len(self.two_positions)

    def degree(self, i: int) -> int:
        self._check_range(i)
        if i == 0:
            return 0
        return 2 if i in self._twos else 1

    def degrees(self, n: int) -> list[int]:
        out = AllOnesAfterZero().degrees(n)
        for k in self.two_positions:
            if k < n:
                out[k] = 2
        return out

    def prefix(self) -> Explicit:
        """The explicit terms up to and including the last inserted 2."""
        return Explicit(tuple(self.degrees(self.two_positions[-1] + 1)))

    @property
    def spec(self) -> str:
        return f"triangle:rounds={self.rounds}"


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _splitmix64_np(x: np.ndarray) -> np.ndarray:
    x = x + np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@dataclass(frozen=True)
class Bernoulli(DegreeSequence):
    """``d_0 = 0`` and ``d_i = 1`` with probability ``p`` for ``i >= 1``.

    The draw for index ``i`` is a hash of ``(seed, i)``, so terms can be read
    in any order.  The coin compares the top 32 bits of the hash against
    ``p``; for denominators that are not powers of two the realised
    probability is ``p`` rounded up to a multiple of ``2**-32``.
    """

    p: Fraction
    seed: int

    kind = "bernoulli"
    zero_one = True

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 < p <= 1:
            raise SequenceError(f"p must lie in (0, 1], got {p}")
        if p.denominator >= 2**32:
            raise SequenceError(f"denominator of p too large: {p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)

    @cached_property
    def _key(self) -> int:
        return _splitmix64(self.seed)

    def degree(self, i: int) -> int:
        self._check_range(i)
        if i == 0:
            return 0
        h = _splitmix64((self._key + i * _GOLDEN) & _MASK64)
        return int((h >> 32) * self.p.denominator < self.p.numerator << 32)

    def degrees(self, n: int) -> list[int]:
        return self.degree_array(n).tolist()

    def degree_array(self, n: int) -> np.ndarray:
        """``d_0..d_{n-1}`` as a uint8 array."""
        idx = np.arange(n, dtype=np.uint64)
        h = _splitmix64_np(np.uint64(self._key) + idx * np.uint64(_GOLDEN))
        u = h >> np.uint64(32)
        out = (u * np.uint64(self.p.denominator)) < np.uint64(self.p.numerator << 32)
        out = out.astype(np.uint8)
        if n:
            out[0] = 0
        return out

    def with_seed(self, seed: int) -> Bernoulli:
        return Bernoulli(self.p, seed)

    @property
    def spec(self) -> str:
        return f"bernoulli:p={self.p},seed={self.seed}"


def degree(seq: DegreeSequence, i: int, seed: int | None = None) -> int:
    """``d_i`` of ``seq``; ``seed`` is mandatory for (and only for) Bernoulli."""
    if isinstance(seq, Bernoulli):
        if seed is None:
            raise SequenceError("Bernoulli degrees need a seed")
        return seq.with_seed(seed).degree(i)
    if seed is not None:
        raise SequenceError(f"{seq.kind} sequences take no seed")
    return seq.degree(i)


def build_triangle_construction(rounds: int, max_index: int = MAX_INDEX) -> TriangleConstruction:
    """Insert ``rounds`` 2's into 0,1,1,... so the expected triangle count stays below 3/4.

    The first 2 sits at index 3 (chance 2/3).  After the l-th 2, the next one
    goes to the least free index ``k`` with
    ``(k + l - 1) / C(k, 2) < 3/4 - (p_0 + ... + p_{l-1})`` and its triangle
    chance is the left-hand side.
    """
    if rounds < 1:
        raise SequenceError("rounds must be >= 1")
    positions = [3]
    probs = [Fraction(2, 3)]
    budget = Fraction(3, 4) - probs[0]
    for l in range(1, rounds):

        def closes(k: int) -> bool:
            # (k + l - 1) / C(k, 2) < budget, cleared of denominators
            return 2 * (k + l - 1) * budget.denominator < budget.numerator * k * (k - 1)

        lo = positions[-1] + 1
        hi = lo
        while not closes(hi):
            hi *= 2
            if hi > 4 * max_index:
                break
        while lo < hi:
            mid = (lo + hi) // 2
            if closes(mid):
                hi = mid
            else:
                lo = mid + 1
        k = lo
        if k >= max_index:
            raise SequenceError(
                f"triangle round {l} needs index {k} >= max_index={max_index}"
            )
        p = Fraction(k + l - 1, math.comb(k, 2))
        positions.append(k)
        probs.append(p)
        budget -= p
    return TriangleConstruction(tuple(positions), tuple(probs))


@dataclass(frozen=True)
class SeriesLedger:
    """Exact prefix sums of a sequence up to ``horizon`` (inclusive).

    ``s(n)`` is the degree sum of indices ``0..n`` and ``t(n, m)`` the sum of
    ``d_i / i`` over ``n <= i <= m`` (the i = 0 term is taken as zero).
    """

    degrees: tuple[int, ...]

    @property
    def horizon(self) -> int:
        return len(self.degrees) - 1

    @cached_property
    def _s(self) -> list[int]:
        out, acc = [], 0
        for d in self.degrees:
            acc += d
            out.append(acc)
        return out

    @cached_property
    def _t(self) -> list[Fraction]:
        # _t[n] = sum_{1 <= i <= n} d_i / i
        out = [Fraction(0)]
        acc = Fraction(0)
        for i in range(1, len(self.degrees)):
            d = self.degrees[i]
            if d:
                acc += Fraction(d, i)
            out.append(acc)
        return out

    def _check(self, *idx: int) -> None:
        for n in idx:
            if not 0 <= n <= self.horizon:
                raise SequenceError(f"index {n} outside ledger horizon {self.horizon}")

    def d(self, n: int) -> int:
        self._check(n)
        return self.degrees[n]

    def s(self, n: int) -> int:
        self._check(n)
        return self._s[n]

    def s_window(self, m: int, n: int) -> int:
        """``s_{m,n}``; zero when ``n < m``."""
        if n < m:
            return 0
        self._check(m, n)
        return self._s[n] - (self._s[m - 1] if m > 0 else 0)

    def t(self, n: int, m: int) -> Fraction:
        """``t_{n,m}``; zero when ``m < n``."""
        if m < n:
            return Fraction(0)
        self._check(n, m)
        return self._t[m] - self._t[max(n - 1, 0)]

    def a_min(self, n: int) -> Fraction:
        """``min(d_n / n, (n - d_n) / n)`` for ``n >= 1``."""
        self._check(n)
        if n < 1:
            raise SequenceError("a_n is defined for n >= 1")
        d = self.degrees[n]
        return Fraction(min(d, n - d), n)


def ledger(seq: DegreeSequence, horizon: int, seed: int | None = None) -> SeriesLedger:
    if horizon < 0:
        raise SequenceError("horizon must be >= 0")
    if seed is not None:
        if not isinstance(seq, Bernoulli):
            raise SequenceError(f"{seq.kind} sequences take no seed")
        seq = seq.with_seed(seed)
    return SeriesLedger(tuple(seq.degrees(horizon + 1)))


# -- regimes -----------------------------------------------------------------

def regime(seq: DegreeSequence) -> str | None:
    """Analytic sparsity class of a registered family.

    ``"dense"`` when the sum of d_i/i diverges, ``"sparse"`` when it converges,
    ``"very-sparse"`` when additionally the sum of s_i d_i / i converges.
    Random families report their almost-sure class.  ``None`` for explicit
    lists: a finite prefix says nothing about convergence.
    """
    if isinstance(seq, (AllOnesAfterZero, ConstFraction, TriangleConstruction, Bernoulli)):
        return "dense"
    if isinstance(seq, ZeroOnePattern):
        return "dense" if seq.periodic_ones else "very-sparse"
    if isinstance(seq, GeometricOnes):
        return "very-sparse"
    if isinstance(seq, PowerOnes):
        # s at m**q is m, so sum s_i d_i / i ~ sum m**(1 - q)
        return "very-sparse" if seq.exponent > 2 else "sparse"
    return None


def is_sparse(seq: DegreeSequence) -> bool:
    return regime(seq) in ("sparse", "very-sparse")


# -- spec mini-language ------------------------------------------------------

_RATIONAL = re.compile(r"^\d+(/\d+)?$")


def _parse_rational(token: str, pos: int) -> Fraction:
    if not _RATIONAL.match(token):
        raise SequenceSpecError("expected a rational like 1/2", token, pos)
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise SequenceSpecError("zero denominator", token, pos) from None


def _parse_int(token: str, pos: int) -> int:
    if not token.isdigit():
        raise SequenceSpecError("expected a non-negative integer", token, pos)
    return int(token)


def _parse_bits(token: str, pos: int) -> tuple[int, ...]:
    if not token or any(c not in "01" for c in token):
        raise SequenceSpecError("expected a string of 0/1 bits", token, pos)
    return tuple(int(c) for c in token)


def _parse_kv(body: str, offset: int, allowed: Iterable[str]) -> dict[str, tuple[str, int]]:
    allowed = set(allowed)
    out: dict[str, tuple[str, int]] = {}
    pos = offset
    for part in body.split(","):
        if "=" not in part:
            raise SequenceSpecError("expected key=value", part, pos)
        key, value = part.split("=", 1)
        if key not in allowed:
            raise SequenceSpecError(f"unknown key (allowed: {', '.join(sorted(allowed))})", key, pos)
        if key in out:
            raise SequenceSpecError("duplicate key", key, pos)
        out[key] = (value, pos + len(key) + 1)
        pos += len(part) + 1
    return out


def _require(kv: dict, key: str, text: str) -> tuple[str, int]:
    if key not in kv:
        raise SequenceSpecError(f"missing required key {key!r}", text, 0)
    return kv[key]


def read_explicit_file(path: str | Path) -> Explicit:
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if not line.isdigit():
            raise SequenceSpecError(f"bad integer in {path} line {lineno}", line, lineno)
        values.append(int(line))
    return Explicit(tuple(values))


def parse_sequence(text: str) -> DegreeSequence:
    """Parse a sequence spec such as ``explicit:0,1,1,2`` or ``const-frac:1/2``."""
    text = text.strip()
    if text == "ones":
        return AllOnesAfterZero()
    if text.startswith("explicit@"):
        path = text[len("explicit@"):]
        if not path:
            raise SequenceSpecError("missing file name", text, len("explicit@"))
        try:
            return read_explicit_file(path)
        except OSError as exc:
            raise SequenceSpecError(f"cannot read file ({exc.strerror})", path, 9) from None
    head, sep, body = text.partition(":")
    if not sep:
        raise SequenceSpecError("unknown sequence kind", head, 0)
    off = len(head) + 1
    try:
        if head == "explicit":
            values, pos = [], off
            for tok in body.split(","):
                values.append(_parse_int(tok, pos))
                pos += len(tok) + 1
            return Explicit(tuple(values))
        if head == "const-frac":
            return ConstFraction(_parse_rational(body, off))
        if head == "zero-one":
            kv = _parse_kv(body, off, ("pattern", "prefix"))
            pattern = _parse_bits(*_require(kv, "pattern", text))
            prefix = _parse_bits(*kv["prefix"]) if "prefix" in kv else ()
            return ZeroOnePattern(pattern, prefix)
        if head == "triangle":
            kv = _parse_kv(body, off, ("rounds",))
            return build_triangle_construction(_parse_int(*_require(kv, "rounds", text)))
        if head == "bernoulli":
            kv = _parse_kv(body, off, ("p", "seed"))
            p = _parse_rational(*_require(kv, "p", text))
            seed = _parse_int(*_require(kv, "seed", text))
            return Bernoulli(p, seed)
        if head == "geometric":
            kv = _parse_kv(body, off, ("base",))
            return GeometricOnes(_parse_int(*_require(kv, "base", text)))
        if head == "powers":
            kv = _parse_kv(body, off, ("q",))
            return PowerOnes(_parse_int(*_require(kv, "q", text)))
    except SequenceSpecError:
        raise
    except SequenceError as exc:
        raise SequenceSpecError(str(exc), body, off) from None
    raise SequenceSpecError("unknown sequence kind", head, 0)
