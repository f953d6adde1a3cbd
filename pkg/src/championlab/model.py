"""Primorial ladder and the champion prediction model.

The model value M(x, d) is the pair singular series at d damped by the
factor (1 - d/log x); its argmax over even d tracks the most common
prime gap. Within any block between consecutive primorials the series
is maximized at the block's primorial (an even d below the next
primorial has at most as many odd prime factors, each at least as
large), so the exact argmax over a huge window reduces to scanning the
primorial candidates; dense windows are still evaluated literally.

Interval endpoints at champion scale overflow any float, so they are
carried as base-10 logarithms and rendered mantissa/exponent on demand.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import CapacityError, DomainError
from .primes import PrimeStream
from .singular import sigma_pair

LN10 = math.log(10.0)

DEFAULT_LADDER_EXTENT = 50

# Largest number of even-d points evaluated literally in a scan before
# switching to the primorial-candidate argmax.
DENSE_SCAN_CAP = 200_000


@dataclass(frozen=True)
class LadderEntry:
    index: int
    prime: int
    primorial: int
    log_primorial: float


class PrimorialLadder:
    """The sequence p_k and p_k# with lookup by value and by log value."""

    def __init__(self, extent: int = DEFAULT_LADDER_EXTENT):
        if extent < 1:
            raise DomainError("ladder extent must be >= 1")
        primes: list[int] = []
        bound = 400
        while len(primes) < extent:
            primes = list(PrimeStream(bound))
            bound *= 4
        entries = []
        primorial = 1
        log_primorial = np.longdouble(0.0)
        for i, p in enumerate(primes[:extent], start=1):
            primorial *= p
            log_primorial += np.log(np.longdouble(p))
            entries.append(LadderEntry(i, p, primorial, float(log_primorial)))
        self.entries: tuple[LadderEntry, ...] = tuple(entries)
        self._values = [e.primorial for e in entries]
        self._logs = [e.log_primorial for e in entries]

    @property
    def extent(self) -> int:
        return len(self.entries)

    def entry(self, index: int) -> LadderEntry:
        if not 1 <= index <= self.extent:
            raise DomainError(
                f"ladder index must lie in [1, {self.extent}], got {index}"
            )
        return self.entries[index - 1]

    def floor_entry(self, y: float) -> LadderEntry:
        """Largest primorial <= y."""
        if y < 2:
            raise DomainError(f"no primorial is <= {y}")
        i = bisect_right(self._values, y)
        return self.entries[i - 1]

    def ceiling_entry(self, y: float) -> LadderEntry:
        """Smallest primorial >= y."""
        i = bisect_left(self._values, y)
        if i >= self.extent:
            raise CapacityError(
                f"no primorial >= {y} within the ladder (extent {self.extent})"
            )
        return self.entries[i]

    def floor_entry_log(self, ln_y: float) -> LadderEntry:
        if ln_y < math.log(2.0):
            raise DomainError(f"no primorial has log <= {ln_y}")
        i = bisect_right(self._logs, ln_y)
        return self.entries[i - 1]

    def ceiling_entry_log(self, ln_y: float) -> LadderEntry:
        i = bisect_left(self._logs, ln_y)
        if i >= self.extent:
            raise CapacityError(
                f"no primorial with log >= {ln_y} within the ladder"
            )
        return self.entries[i]

    def in_range(self, lo: float, hi: float) -> list[LadderEntry]:
        """Ladder entries with lo <= primorial <= hi."""
        i = bisect_left(self._values, lo)
        j = bisect_right(self._values, hi)
        return list(self.entries[i:j])


@lru_cache(maxsize=4)
def default_ladder(extent: int = DEFAULT_LADDER_EXTENT) -> PrimorialLadder:
    return PrimorialLadder(extent)


@dataclass(frozen=True)
class LogInterval:
    """An interval stored as base-10 logarithms of its endpoints."""

    lo_log10: float
    hi_log10: float

    def __post_init__(self):
        if self.lo_log10 > self.hi_log10:
            raise DomainError(
                f"empty interval: lo 1e{self.lo_log10:.6g} > hi 1e{self.hi_log10:.6g}"
            )

    def contains(self, other: "LogInterval") -> bool:
        return self.lo_log10 <= other.lo_log10 and other.hi_log10 <= self.hi_log10


def scientific(log10_value: float, digits: int = 3) -> str:
    """Render a base-10 log as `m.mme<exp>` with 1 <= mantissa < 10."""
    exponent = math.floor(log10_value)
    mantissa = 10.0 ** (log10_value - exponent)
    mantissa = round(mantissa, digits - 1)
    if mantissa >= 10.0:
        mantissa /= 10.0
        exponent += 1
    return f"{mantissa:.{digits - 1}f}e{exponent}"


def model_value(log_x: float, d: int) -> float:
    """M(x, d): the pair series at d damped by (1 - d/log x)."""
    return sigma_pair(d).value * (1.0 - d / log_x)


@dataclass(frozen=True)
class ModelScan:
    log_x: float
    values: dict[int, float]
    argmax_d: int
    ties: tuple[int, ...]
    window: tuple[int, int]
    dense: bool


def model_scan(log_x: float, d_max: Optional[int] = None) -> ModelScan:
    """Evaluate the model over even d in [2, d_max] and locate its argmax.

    Windows up to DENSE_SCAN_CAP points are evaluated literally; larger
    windows use the primorial-dominance reduction, which is exact, and
    report values for the candidate set only.
    """
    if log_x <= 0:
        raise DomainError(f"log x must be positive, got {log_x}")
    if d_max is None:
        d_max = math.ceil(log_x * log_x)
    if d_max < 2:
        raise DomainError(f"d_max must be >= 2, got {d_max}")

    n_points = d_max // 2
    dense = n_points <= DENSE_SCAN_CAP
    if dense:
        candidates = range(2, d_max + 1, 2)
    else:
        ladder = default_ladder()
        candidates = [e.primorial for e in ladder.in_range(2, d_max)]
        if not candidates:
            candidates = [2]

    values = {d: model_value(log_x, d) for d in candidates}
    best = max(values.values())
    ties = tuple(sorted(d for d, v in values.items() if v == best))
    return ModelScan(
        log_x=log_x,
        values=values,
        argmax_d=ties[0],
        ties=ties,
        window=(2, d_max),
        dense=dense,
    )


@dataclass(frozen=True)
class TransitionInterval:
    """Range of x (as base-10 logs) over which one champion should reign.

    rank indexes the conjectured champion sequence 2, 4, 6, 30, 210, ...;
    from rank 3 on the champion is the primorial with rank - 1 prime
    factors, and only those ranks have a nonempty interval.
    """

    rank: int
    primorial: int
    interval: LogInterval


def transition_interval(
    rank: int, delta: float = 0.0, ladder: Optional[PrimorialLadder] = None
) -> TransitionInterval:
    """Interval [exp((1+delta) P log P), exp((1-delta) P (log P)^2)]."""
    if not 0.0 <= delta < 0.5:
        raise DomainError(f"delta must lie in [0, 1/2), got {delta}")
    if rank < 3:
        raise DomainError(
            f"champion rank {rank} has no transition interval (ranks start at 3)"
        )
    ladder = ladder or default_ladder()
    entry = ladder.entry(rank - 1)
    p, ln_p = float(entry.primorial), entry.log_primorial
    lo = (1.0 + delta) * p * ln_p / LN10
    hi = (1.0 - delta) * p * ln_p * ln_p / LN10
    if lo > hi:
        raise DomainError(
            f"interval for rank {rank} is empty at delta={delta}"
        )
    return TransitionInterval(rank, entry.primorial, LogInterval(lo, hi))


@dataclass(frozen=True)
class ChampionWindows:
    """The champion-bracketing windows at a given log x.

    inner is [a log x/(log log x)^2, b log x/log log x]; when it holds a
    primorial that primorial is the predicted champion, otherwise the
    primorials of the two flanking windows are the candidates.
    """

    log_x: float
    inner: tuple[float, float]
    outer_lo: tuple[float, float]
    outer_hi: tuple[float, float]
    inner_primorials: tuple[int, ...]
    lo_primorials: tuple[int, ...]
    hi_primorials: tuple[int, ...]
    predicted: tuple[int, ...]


def champion_windows(
    log_x: float,
    a: float = 1.05,
    a_prime: float = 0.80,
    b: float = 0.95,
    b_prime: float = 1.20,
    ladder: Optional[PrimorialLadder] = None,
) -> ChampionWindows:
    if not (0.75 <= a_prime < b < 1.0 < a < b_prime <= 1.25):
        raise DomainError(
            "window parameters must satisfy 3/4 <= a' < b < 1 < a < b' <= 5/4, "
            f"got a'={a_prime}, b={b}, a={a}, b'={b_prime}"
        )
    if log_x <= 1.0:
        raise DomainError(f"log x must exceed 1, got {log_x}")
    ladder = ladder or default_ladder()
    llx = math.log(log_x)
    inner = (a * log_x / llx**2, b * log_x / llx)
    outer_lo = (a_prime * log_x / llx**2, a * log_x / llx**2)
    outer_hi = (b * log_x / llx, b_prime * log_x / llx)

    inner_p = tuple(e.primorial for e in ladder.in_range(*inner))
    lo_p = tuple(
        e.primorial
        for e in ladder.in_range(outer_lo[0], outer_lo[1])
        if e.primorial < outer_lo[1]  # half-open on the right
    )
    hi_p = tuple(
        e.primorial
        for e in ladder.in_range(outer_hi[0], outer_hi[1])
        if e.primorial > outer_hi[0]  # half-open on the left
    )
    predicted = inner_p if inner_p else tuple(sorted(set(lo_p) | set(hi_p)))
    return ChampionWindows(
        log_x, inner, outer_lo, outer_hi, inner_p, lo_p, hi_p, predicted
    )


def predicted_gap_count_log10(log_x: float, d: int) -> float:
    """log10 of the modeled consecutive-gap count; -inf where the model is <= 0."""
    if d < 2 or d % 2:
        raise DomainError(f"d must be a positive even integer, got {d}")
    if d > log_x * log_x:
        raise DomainError(
            f"d={d} lies outside the model range d <= (log x)^2 = {log_x * log_x:.6g}"
        )
    m = model_value(log_x, d)
    if m <= 0.0:
        return -math.inf
    return (log_x + math.log(m)) / LN10 - 2.0 * math.log10(log_x)


def predicted_gap_count(log_x: float, d: int) -> float:
    """Modeled count of consecutive gaps d up to exp(log_x), as an absolute value."""
    log10n = predicted_gap_count_log10(log_x, d)
    if log10n == -math.inf:
        return 0.0
    if log10n > 300.0:
        raise CapacityError(
            f"predicted count near 1e{log10n:.0f} overflows a float; "
            "use predicted_gap_count_log10"
        )
    return 10.0 ** log10n
