"""Brute-force singular series averages and window sums.

The average A_k(d, D) sums the singular series over all ordered offset
tuples 0 < d_1 < ... < d_{k-2} < D joined with {0, d}; its main term is
the pair series at d times D^(k-2)/(k-2)!. Terms whose offset set mixes
parities vanish (two residues mod 2 are covered), so the scan screens
them out before evaluating anything; the screen is provably exact and
is itself checked by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .singular import OffsetSet, sigma, sigma_pair


@dataclass(frozen=True)
class AverageReport:
    """A_k(d, cap) against its predicted main term."""

    k: int
    d: int
    cap: int
    sum: float
    main_term: float
    ratio: Optional[float]
    remainder: float


def average(k: int, d: int, cap: int, rel_tolerance: float = 1e-8) -> AverageReport:
    """Sum the singular series over (k-2)-tuples below cap, anchored at {0, d}."""
    if k not in (3, 4):
        raise DomainError(f"averages are implemented for k in {{3, 4}}, got {k}")
    if d < 2 or d % 2:
        raise DomainError(f"d must be a positive even integer, got {d}")
    if not 1 <= cap <= d:
        raise DomainError(f"need 1 <= D <= d, got D={cap}")

    terms: list[float] = []
    if k == 3:
        for d1 in range(2, cap, 2):  # odd d1 -> nu(2) = 2 -> zero term
            terms.append(sigma(OffsetSet.of([0, d1, d]), rel_tolerance).value)
    else:
        for d1 in range(2, cap, 2):
            for d2 in range(d1 + 2, cap, 2):
                terms.append(
                    sigma(OffsetSet.of([0, d1, d2, d]), rel_tolerance).value
                )
    total = math.fsum(terms)
    main = sigma_pair(d).value * cap ** (k - 2) / math.factorial(k - 2)
    return AverageReport(
        k=k,
        d=d,
        cap=cap,
        sum=total,
        main_term=main,
        ratio=total / main if main > 0 else None,
        remainder=total - main,
    )


def average_unscreened(k: int, d: int, cap: int, rel_tolerance: float = 1e-8) -> float:
    """Same sum without the parity screen; exists to certify the screen."""
    if k != 3:
        raise DomainError("unscreened reference covers k = 3 only")
    terms = [
        sigma(OffsetSet.of([0, d1, d]), rel_tolerance).value
        for d1 in range(1, cap)
    ]
    return math.fsum(terms)


@dataclass(frozen=True)
class WindowSum:
    """Sum of sigma(D + {d0}) over a window of appended offsets."""

    sum: float
    main: float
    skipped: tuple[int, ...]


def window_sum(
    dset: OffsetSet, window: int, h: int, rel_tolerance: float = 1e-8
) -> WindowSum:
    """Sum sigma(D united with {d0}) for d0 = 1..window, with D inside [0, h].

    Offsets d0 already present in D are skipped (the series is defined
    on sets); the skipped values are reported so callers can see the
    boundary rule applied. The main term is sigma(D) times the window.
    """
    if window > h:
        raise DomainError(f"window H={window} exceeds the ambient bound h={h}")
    if window < 1:
        raise DomainError(f"window must be positive, got {window}")
    if dset.offsets[0] < 0 or dset.offsets[-1] > h:
        raise DomainError(f"offsets {dset.offsets} fall outside [0, {h}]")
    base = sigma(dset, rel_tolerance).value
    terms: list[float] = []
    skipped: list[int] = []
    for d0 in range(1, window + 1):
        if d0 in dset.offsets:
            skipped.append(d0)
            continue
        terms.append(sigma(dset.with_offset(d0), rel_tolerance).value)
    return WindowSum(
        sum=math.fsum(terms),
        main=base * window,
        skipped=tuple(skipped),
    )
