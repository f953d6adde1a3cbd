"""Segmented sieve of Eratosthenes and derived prime functions.

The sieve stores odd numbers only (2 is emitted by a special case) and
works in fixed-size segments so memory stays bounded no matter how large
the limit is. Everything downstream (gap census, tuple scans, singular
series cutoffs) draws its primes from here.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CapacityError, DomainError

# Default segment covers 2**20 odd slots (about 2.1e6 integers): small
# enough to stay cache resident while marking.
DEFAULT_SEGMENT_ODDS = 1 << 20

# Hard budget for any single sieve request; far above desk scale.
MAX_SIEVE_LIMIT = 10_000_000_000


@dataclass(frozen=True)
class SieveSegment:
    """One sieved block: flags[j] is True iff lo + 2j + 1 is composite.

    lo and hi are even, hi exclusive; the slot for the integer 1 (when
    lo == 0) is flagged composite so that clear always means prime.
    """

    lo: int
    hi: int
    flags: np.ndarray

    def primes(self) -> np.ndarray:
        return self.lo + 1 + 2 * np.flatnonzero(~self.flags)


def _small_odd_primes(limit: int) -> np.ndarray:
    """Odd primes <= limit via a dense sieve (used for base primes)."""
    if limit < 3:
        return np.empty(0, dtype=np.int64)
    is_comp = np.zeros(limit + 1, dtype=bool)
    for p in range(3, math.isqrt(limit) + 1, 2):
        if not is_comp[p]:
            is_comp[p * p :: 2 * p] = True
    cand = np.arange(3, limit + 1, 2, dtype=np.int64)
    return cand[~is_comp[3::2][: len(cand)]]


def mark_segment(lo: int, hi: int, base_primes: np.ndarray) -> SieveSegment:
    """Sieve the odd numbers in [lo, hi) against the given odd base primes.

    Pure function: segments may be marked in any order or concurrently.
    """
    if lo % 2 or hi % 2 or lo >= hi:
        raise DomainError(f"segment bounds must be even with lo < hi, got [{lo}, {hi})")
    n_odds = (hi - lo) // 2
    flags = np.zeros(n_odds, dtype=bool)
    if lo == 0:
        flags[0] = True  # the slot for 1
    for p in base_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        flags[(start - lo - 1) // 2 :: p] = True
    return SieveSegment(lo, hi, flags)


class PrimeStream:
    """All primes <= limit, in increasing order, sieved segment by segment.

    Iterating yields Python ints; blocks() yields one int64 array per
    segment, which is what the array-oriented consumers use. The stream
    is re-iterable and holds no mutable state between passes.
    """

    def __init__(self, limit: int, segment_odds: int = DEFAULT_SEGMENT_ODDS):
        if limit < 0:
            raise DomainError(f"limit must be nonnegative, got {limit}")
        if limit > MAX_SIEVE_LIMIT:
            raise CapacityError(
                f"limit {limit} exceeds the sieve budget of {MAX_SIEVE_LIMIT}"
            )
        if segment_odds < 1:
            raise DomainError("segment_odds must be positive")
        self.limit = int(limit)
        self.segment_odds = int(segment_odds)
        self._base = _small_odd_primes(math.isqrt(self.limit))

    def blocks(self) -> Iterator[np.ndarray]:
        if self.limit < 2:
            return
        span = 2 * self.segment_odds
        first = True
        for lo in range(0, self.limit + 1, span):
            hi = min(lo + span, ((self.limit + 2) // 2) * 2)
            if lo >= hi:
                break
            seg = mark_segment(lo, hi, self._base)
            block = seg.primes()
            block = block[block <= self.limit]
            if first:
                block = np.concatenate(([2], block))
                first = False
            if len(block):
                yield block

    def __iter__(self) -> Iterator[int]:
        for block in self.blocks():
            yield from (int(p) for p in block)

    def count(self) -> int:
        return sum(len(b) for b in self.blocks())

    def array(self) -> np.ndarray:
        parts = list(self.blocks())
        if not parts:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(parts)


def primes_up_to(limit: int, segment_odds: int = DEFAULT_SEGMENT_ODDS) -> PrimeStream:
    """Stream of all primes <= limit in increasing order."""
    return PrimeStream(limit, segment_odds)


def nth_prime(n: int) -> int:
    """The n-th prime, p_1 = 2."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n < 6:
        return (2, 3, 5, 7, 11)[n - 1]
    # Rosser bound: p_n < n (ln n + ln ln n) for n >= 6.
    bound = int(n * (math.log(n) + math.log(math.log(n)))) + 1
    if bound > MAX_SIEVE_LIMIT:
        raise CapacityError(
            f"p_{n} lies beyond the sieve budget of {MAX_SIEVE_LIMIT}"
        )
    seen = 0
    for block in PrimeStream(bound).blocks():
        if seen + len(block) >= n:
            return int(block[n - seen - 1])
        seen += len(block)
    raise RuntimeError("unreachable: the Rosser bound guarantees n primes")


def chebyshev_theta(y: int | float) -> float:
    """Sum of log p over primes p <= y, accumulated in extended precision."""
    if y < 0:
        raise DomainError(f"theta is defined for y >= 0, got {y}")
    total = np.longdouble(0.0)
    for block in PrimeStream(int(y)).blocks():
        total += np.sum(np.log(block.astype(np.float64)), dtype=np.longdouble)
    return float(total)


# Shared, growable prime table used by the singular-series machinery.
# Grown under a lock, then read-only; callers must not mutate the array.
_table_lock = threading.Lock()
_table: np.ndarray = np.empty(0, dtype=np.int64)
_table_limit: int = 0

MAX_TABLE_LIMIT = 400_000_000


def prime_table(limit: int) -> np.ndarray:
    """Array of all primes <= limit, cached and grown on demand."""
    global _table, _table_limit
    if limit <= _table_limit:
        return _table
    if limit > MAX_TABLE_LIMIT:
        raise CapacityError(
            f"prime table to {limit} exceeds the budget of {MAX_TABLE_LIMIT}"
        )
    with _table_lock:
        if limit > _table_limit:
            # Grow geometrically so repeated nudges do not resieve.
            target = max(limit, 2 * _table_limit, 1 << 17)
            target = min(target, MAX_TABLE_LIMIT)
            _table = PrimeStream(target, segment_odds=1 << 23).array()
            _table_limit = target
    return _table
