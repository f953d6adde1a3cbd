"""Consecutive prime gap census and non-consecutive tuple counters.

The census counts each gap at its larger endpoint: a gap between p and
the next prime q contributes to the histogram for bound x only when
q <= x. Tuple counters (pairs, triples, quadruples at fixed offsets)
scan a primality bitmap with shifted AND, which is the hot path for the
inclusion-exclusion bounds.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError
from .primes import PrimeStream
from .singular import OffsetSet

log = logging.getLogger("championlab.census")


@dataclass(frozen=True)
class GapCensus:
    """Histogram of consecutive prime gaps d with larger endpoint <= x."""

    x: int
    counts: dict[int, int]
    total_primes: int
    n_star: int
    champions: tuple[int, ...]

    @classmethod
    def from_counts(cls, x: int, counts: dict[int, int], total_primes: int) -> "GapCensus":
        n_star = max(counts.values())
        champs = tuple(sorted(d for d, c in counts.items() if c == n_star))
        return cls(x, dict(sorted(counts.items())), total_primes, n_star, champs)


@dataclass(frozen=True)
class TupleCount:
    x: int
    offsets: OffsetSet
    count: int


def _prime_array(x: int) -> np.ndarray:
    return PrimeStream(x).array()


@lru_cache(maxsize=3)
def _bitmap(x: int) -> np.ndarray:
    """Primality flags over [0, x]; shared by the tuple scans."""
    stream = PrimeStream(x)  # validates the budget before any allocation
    bm = np.zeros(x + 1, dtype=bool)
    for block in stream.blocks():
        bm[block] = True
    bm.setflags(write=False)
    return bm


def segment_gap_counts(primes: np.ndarray, lo: int, hi: int) -> Counter:
    """Gap counts restricted to gaps whose larger prime lies in [lo, hi)."""
    i0 = int(np.searchsorted(primes, lo, side="left"))
    i1 = int(np.searchsorted(primes, hi, side="left"))
    if i1 <= i0:
        return Counter()
    start = max(i0 - 1, 0)  # pull in the predecessor of the first prime in range
    gaps = np.diff(primes[start:i1])
    vals, cnts = np.unique(gaps, return_counts=True)
    return Counter({int(d): int(c) for d, c in zip(vals, cnts)})


def merge_gap_counts(parts: list[Counter]) -> Counter:
    total: Counter = Counter()
    for part in parts:
        total += part
    return total


def census(x: int, threads: int = 1) -> GapCensus:
    """Full gap histogram for primes up to x, plus champions.

    The segment scans are independent and may run on a worker pool; the
    merged counts are identical for any thread count.
    """
    if x < 3:
        raise DomainError(f"no prime gap exists below x = 3, got {x}")
    primes = _prime_array(x)
    if threads <= 1 or len(primes) < 4:
        gaps = np.diff(primes)
        vals, cnts = np.unique(gaps, return_counts=True)
        counts = {int(d): int(c) for d, c in zip(vals, cnts)}
    else:
        bounds = np.linspace(2, x + 1, threads + 1).astype(np.int64)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(
                    lambda ab: segment_gap_counts(primes, int(ab[0]), int(ab[1])),
                    zip(bounds[:-1], bounds[1:]),
                )
            )
        counts = dict(merge_gap_counts(parts))
    return GapCensus.from_counts(x, counts, len(primes))


def _shifted_and_count(x: int, shifts: tuple[int, ...], threads: int = 1) -> int:
    """Count primes p <= x with p - s prime for every s in shifts."""
    bm = _bitmap(x)
    n = len(bm)
    d = max(shifts)
    chunk = 1 << 24  # fixed chunking keeps results identical across pools

    def count_range(start: int) -> int:
        stop = min(start + chunk, n)
        acc = bm[start:stop].copy()
        for s in shifts:
            acc &= bm[start - s : stop - s]
        return int(np.count_nonzero(acc))

    starts = list(range(d, n, chunk))
    if threads <= 1 or len(starts) == 1:
        return sum(count_range(s) for s in starts)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(count_range, starts))


def pair_count(x: int, d: int, threads: int = 1) -> TupleCount:
    """pi_2(x, d): primes p <= x with p - d also prime (not necessarily adjacent)."""
    if x < 3:
        raise DomainError(f"x must be >= 3, got {x}")
    if d < 2 or d % 2:
        raise DomainError(f"pair gap must be a positive even integer, got {d}")
    count = _shifted_and_count(x, (d,), threads) if d <= x else 0
    return TupleCount(x, OffsetSet.of([0, d]), count)


def triple_count(x: int, d_prime: int, d: int, threads: int = 1) -> TupleCount:
    """pi_3(x, d', d): primes p <= x with p - d' and p - d both prime."""
    if x < 3:
        raise DomainError(f"x must be >= 3, got {x}")
    if not (2 <= d_prime < d):
        raise DomainError(f"need 2 <= d' < d, got d'={d_prime}, d={d}")
    if d_prime % 2 or d % 2:
        raise DomainError(f"offsets must be even, got d'={d_prime}, d={d}")
    count = _shifted_and_count(x, (d_prime, d), threads) if d <= x else 0
    return TupleCount(x, OffsetSet.of([0, d_prime, d]), count)


def quad_count(x: int, d1: int, d2: int, d: int, threads: int = 1) -> TupleCount:
    """pi_4(x, d1, d2, d): primes p <= x with p - d1, p - d2, p - d all prime."""
    if x < 3:
        raise DomainError(f"x must be >= 3, got {x}")
    if not (2 <= d1 < d2 < d):
        raise DomainError(f"need 2 <= d1 < d2 < d, got {d1}, {d2}, {d}")
    if d1 % 2 or d2 % 2 or d % 2:
        raise DomainError(f"offsets must be even, got {d1}, {d2}, {d}")
    count = _shifted_and_count(x, (d1, d2, d), threads) if d <= x else 0
    return TupleCount(x, OffsetSet.of([0, d1, d2, d]), count)


@dataclass(frozen=True)
class ExclusionChain:
    """Inclusion-exclusion bounds sandwiching the consecutive-gap count.

    lower uses the full triple correction (all d' < d); upper truncates
    the correction at D and compensates with quadruples below D. Odd d'
    terms vanish identically (an even shift from an odd prime lands on
    an even number) and are skipped.
    """

    x: int
    d: int
    cap: int
    pi2: int
    sum_pi3: int
    sum_pi3_truncated: int
    sum_pi4: int
    lower: int
    upper: int
    n_gap: int
    holds: bool


def exclusion_chain(x: int, d: int, cap: int, threads: int = 1) -> ExclusionChain:
    """Evaluate the sandwich pi2 - sum pi3 <= N(x,d) <= truncated bound."""
    if d < 2 or d % 2:
        raise DomainError(f"d must be a positive even integer, got {d}")
    if not 1 <= cap <= d:
        raise DomainError(f"need 1 <= D <= d, got D={cap}, d={d}")
    pi2 = pair_count(x, d, threads).count
    pi3_terms = {
        dp: triple_count(x, dp, d, threads).count for dp in range(2, d, 2)
    }
    sum_pi3 = sum(pi3_terms.values())
    sum_pi3_trunc = sum(c for dp, c in pi3_terms.items() if dp < cap)
    sum_pi4 = 0
    for d1 in range(2, cap, 2):
        for d2 in range(d1 + 2, cap, 2):
            sum_pi4 += quad_count(x, d1, d2, d, threads).count
    lower = pi2 - sum_pi3
    upper = pi2 - sum_pi3_trunc + sum_pi4
    n_gap = census(x, threads).counts.get(d, 0)
    return ExclusionChain(
        x, d, cap, pi2, sum_pi3, sum_pi3_trunc, sum_pi4,
        lower, upper, n_gap, lower <= n_gap <= upper,
    )


@lru_cache(maxsize=64)
def li(x: float, k: int = 2) -> float:
    """Integral of dt / (log t)^k from 2 to x, the smooth comparator term.

    Adaptive quadrature, relative error well below 1e-9; this converges
    to the tuple counts far faster than x/(log x)^k at reachable x.
    """
    if x <= 2:
        return 0.0
    from scipy.integrate import quad

    val, err = quad(
        lambda t: math.log(t) ** (-k), 2.0, float(x),
        epsabs=0.0, epsrel=1e-11, limit=400,
    )
    if err > 1e-9 * abs(val):
        raise ArithmeticError(f"li_{k}({x}) quadrature error {err} too large")
    return val


# ---------------------------------------------------------------------------
# Census cache file: a header line, CSV rows `d,count` in ascending d,
# and a trailing FNV-1a checksum over the row bytes.
# ---------------------------------------------------------------------------

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _cache_rows(counts: dict[int, int]) -> list[str]:
    return [f"{d},{counts[d]}" for d in sorted(counts)]


def render_census_cache(cns: GapCensus) -> str:
    rows = _cache_rows(cns.counts)
    body = "".join(r + "\n" for r in rows)
    checksum = fnv1a64(body.encode("ascii"))
    return (
        f"gapcensus v1, x={cns.x}, primes={cns.total_primes}\n"
        + body
        + f"checksum,{checksum}\n"
    )


def save_census_cache(cns: GapCensus, path: Path | str) -> None:
    Path(path).write_text(render_census_cache(cns), encoding="ascii")


def load_census_cache(path: Path | str, x: int) -> Optional[GapCensus]:
    """Reload a cached census for the given x; None if stale or corrupt."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="ascii").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        log.warning("census cache %s unreadable (%s); recomputing", path, exc)
        return None
    try:
        header, *rows, check = lines
        if not header.startswith("gapcensus v1, "):
            raise ValueError(f"bad header {header!r}")
        fields = dict(part.split("=") for part in header.split(", ")[1:])
        cached_x = int(fields["x"])
        total_primes = int(fields["primes"])
        if cached_x != x:
            log.warning(
                "census cache %s is for x=%d, need x=%d; recomputing",
                path, cached_x, x,
            )
            return None
        body = "".join(r + "\n" for r in rows)
        tag, stored = check.split(",")
        if tag != "checksum" or int(stored) != fnv1a64(body.encode("ascii")):
            raise ValueError("checksum mismatch")
        counts = {}
        for row in rows:
            d, c = row.split(",")
            counts[int(d)] = int(c)
        if not counts:
            raise ValueError("no rows")
    except (ValueError, KeyError) as exc:
        log.warning("census cache %s corrupt (%s); recomputing", path, exc)
        return None
    return GapCensus.from_counts(x, counts, total_primes)
