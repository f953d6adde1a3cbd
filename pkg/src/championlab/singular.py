"""Hardy-Littlewood singular series evaluation.

The full series for an offset set D of size k is the product over all
primes of (1 - 1/p)^(-k) (1 - nu(p)/p), where nu(p) counts the residue
classes mod p hit by D. Primes not dividing the discriminant (the
product of pairwise offset differences) contribute the generic factor
(1 - 1/p)^(-k) (1 - k/p); only finitely many primes deviate. Evaluation
therefore splits into an exact part over the deviating primes and a
memoized generic product taken to a cutoff chosen from an analytic tail
bound.

The truncated series S_y (product over p <= y only) is also computed a
second way, through the generalized totient phi(n, D) evaluated at the
product of all primes <= y; the two routes must agree to 1e-12 and that
agreement is enforced on every call.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .errors import CapacityError, DomainError, InternalCheckError
from .primes import MAX_TABLE_LIMIT, prime_table

# Largest y for which the totient route materializes the product of all
# primes <= y as an exact integer (about 8700 digits at the cap).
TOTIENT_MAX_Y = 20_000

_MATCH_RTOL = 1e-12


@dataclass(frozen=True)
class OffsetSet:
    """A finite set of distinct nonnegative integer offsets, sorted."""

    offsets: tuple[int, ...]

    def __post_init__(self):
        offs = self.offsets
        if not offs:
            raise DomainError("offset set must be nonempty")
        if any(int(d) != d or d < 0 for d in offs):
            raise DomainError(f"offsets must be nonnegative integers: {offs}")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise DomainError(f"offsets must be strictly increasing: {offs}")

    @classmethod
    def of(cls, values: Iterable[int]) -> "OffsetSet":
        vals = sorted({int(v) for v in values})
        return cls(tuple(vals))

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def spread(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    def discriminant(self) -> int:
        """Product of pairwise |d_j - d_i|, exact in big integers."""
        delta = 1
        offs = self.offsets
        for i, a in enumerate(offs):
            for b in offs[i + 1 :]:
                delta *= b - a
        return delta

    def with_offset(self, d0: int) -> "OffsetSet":
        if d0 in self.offsets:
            raise DomainError(f"offset {d0} already present in {self.offsets}")
        return OffsetSet.of(self.offsets + (d0,))


@dataclass(frozen=True)
class SingularValue:
    """A computed singular series value with its error accounting.

    truncation_y is None for a full-series evaluation (the tail beyond
    the working cutoff is then covered by tail_bound, a bound on the
    relative error). zero_witness, when set, is a prime p whose residue
    classes are fully covered, forcing the value to 0.
    """

    value: float
    truncation_y: Optional[int] = None
    exact_primes: tuple[int, ...] = field(default_factory=tuple)
    tail_bound: float = 0.0
    zero_witness: Optional[int] = None

    @property
    def is_zero(self) -> bool:
        return self.zero_witness is not None


def _primes_through(bound: int) -> tuple[int, ...]:
    """All primes <= bound as Python ints (tiny bounds only)."""
    if bound < 2:
        return ()
    table = prime_table(bound)
    i = int(np.searchsorted(table, bound, side="right"))
    return tuple(int(p) for p in table[:i])


def _is_prime_small(p: int) -> bool:
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if p == q:
            return True
        if p % q == 0:
            return False
    f = 37
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def nu(dset: OffsetSet, p: int) -> int:
    """Number of distinct residue classes mod p occupied by the offsets."""
    if not _is_prime_small(p):
        raise DomainError(f"nu requires a prime modulus, got {p}")
    if p > dset.spread:
        return dset.k  # no two offsets can collide mod p
    return len({d % p for d in dset.offsets})


def distinct_prime_factors(m: int) -> list[int]:
    """Distinct primes dividing m >= 1, by trial division over the table."""
    if m < 1:
        raise DomainError(f"expected a positive integer, got {m}")
    out = []
    if m > 1:
        for p in prime_table(math.isqrt(m)):
            p = int(p)
            if p * p > m:
                break
            if m % p == 0:
                out.append(p)
                while m % p == 0:
                    m //= p
        if m > 1:
            out.append(m)
    return out


def _squarefree_factorization(n: int) -> list[int]:
    """Prime factors of squarefree n; DomainError if a square divides n."""
    factors = []
    m = n
    if m > 1:
        for p in prime_table(math.isqrt(m)):
            p = int(p)
            if p * p > m:
                break
            if m % p == 0:
                m //= p
                if m % p == 0:
                    raise DomainError(f"{n} is not squarefree (divisible by {p}^2)")
                factors.append(p)
        if m > 1:
            factors.append(m)
    return factors


# ---------------------------------------------------------------------------
# Tail bounds and cutoff selection
#
# For p > k the generic factor g_p = (1-1/p)^(-k) (1-k/p) satisfies
# |log g_p| <= k^2 / (p (p - k)). Two rigorous bounds for the sum over
# primes p > y: comparison with the integral over all reals, and partial
# summation against pi(t) < 1.26 t / log t (valid for t >= 17).
# ---------------------------------------------------------------------------


def _generic_tail_bound(k: int, y: int) -> float:
    if y <= max(2 * k, 17):
        return math.inf
    integral = k * math.log(y / (y - k))
    prime_aware = 2.52 * k * k / ((1.0 - k / y) * y * math.log(y))
    return min(integral, prime_aware)


def _cutoff_for(k: int, rel_tolerance: float) -> int:
    y = 1 << 17
    while _generic_tail_bound(k, y) >= rel_tolerance:
        y *= 2
        if y > MAX_TABLE_LIMIT:
            raise CapacityError(
                f"tolerance {rel_tolerance} for k={k} needs primes beyond "
                f"the table budget of {MAX_TABLE_LIMIT}"
            )
    return y


@lru_cache(maxsize=64)
def _generic_constant(k: int, y: int) -> float:
    """Product of (1-1/p)^(-k) (1-k/p) over primes k < p <= y."""
    table = prime_table(y)
    i0 = np.searchsorted(table, k, side="right")
    i1 = np.searchsorted(table, y, side="right")
    p = table[i0:i1].astype(np.float64)
    logs = -k * np.log1p(-1.0 / p) + np.log1p(-k / p)
    return float(np.exp(np.sum(logs, dtype=np.longdouble)))


def _c2_tail_bound(y: int) -> float:
    """Bound on sum over primes p > y of 1/(p-1)^2."""
    if y < 17:
        return math.inf
    integral = 2.0 / y
    prime_aware = (y / (y - 1.0)) ** 2 * 2.52 / (y * math.log(y))
    return min(integral, prime_aware)


def _c2_cutoff(tolerance: float) -> int:
    y = 1 << 17
    while _c2_tail_bound(y) >= tolerance:
        y *= 2
        if y > MAX_TABLE_LIMIT:
            raise CapacityError(
                f"twin prime constant at tolerance {tolerance} needs primes "
                f"beyond the table budget of {MAX_TABLE_LIMIT}"
            )
    return y


@lru_cache(maxsize=16)
def _c2_at_cutoff(y: int) -> float:
    table = prime_table(y)
    i1 = np.searchsorted(table, y, side="right")
    p = table[1:i1].astype(np.float64)  # skip p = 2
    logs = np.log1p(-1.0 / (p - 1.0) ** 2)
    return float(np.exp(np.sum(logs, dtype=np.longdouble)))


_c2_lock = threading.Lock()
_c2_memo: dict[float, float] = {}

# Default precision of the memoized constant reused on hot paths. The
# direct product cannot certify below ~3e-10 within the prime-table
# budget; 1e-8 keeps the shared cutoff modest and is far tighter than
# anything downstream resolves.
C2_DEFAULT_TOLERANCE = 1e-8


def twin_prime_constant(tolerance: float = C2_DEFAULT_TOLERANCE) -> float:
    """The constant 0.66016..., the product of 1 - 1/(p-1)^2 over odd primes.

    The cutoff is chosen so the neglected tail (bounded by 2/y, or by the
    sharper prime-counting bound when 2/y would be unreachable) stays
    below the requested absolute tolerance.
    """
    if not 0 < tolerance < 0.5:
        raise DomainError(f"tolerance must be in (0, 0.5), got {tolerance}")
    with _c2_lock:
        hit = _c2_memo.get(tolerance)
        if hit is None:
            hit = _c2_at_cutoff(_c2_cutoff(tolerance))
            _c2_memo[tolerance] = hit
    return hit


def _zero_witness(dset: OffsetSet) -> Optional[int]:
    """A prime p with nu(p) = p, if one exists; necessarily p <= k."""
    for p in _primes_through(dset.k):
        if nu(dset, p) == p:
            return p
    return None


def sigma_pair(d: int) -> SingularValue:
    """Pair singular series for the gap d, in closed form.

    Even d: twice the twin prime constant times (p-1)/(p-2) per distinct
    odd prime divisor. Odd d: the zero value (witness p = 2).
    """
    if d == 0:
        raise DomainError("pair singular series is undefined for d = 0")
    if d < 0:
        raise DomainError(f"gap must be positive, got {d}")
    if d % 2:
        return SingularValue(0.0, exact_primes=(2,), zero_witness=2)
    c2 = twin_prime_constant()
    value = 2.0 * c2
    odd_divisors = [p for p in distinct_prime_factors(d) if p > 2]
    for p in odd_divisors:
        value *= (p - 1) / (p - 2)
    return SingularValue(
        value,
        exact_primes=tuple([2] + odd_divisors),
        tail_bound=_c2_tail_bound(_c2_cutoff(C2_DEFAULT_TOLERANCE)) / c2,
    )


def phi_tuple(n: int, dset: OffsetSet) -> int:
    """Count of j in [1, n] with prod(j + d) coprime to n, for squarefree n.

    Equals n times the product over p | n of (1 - nu(p)/p), which is an
    integer because n is squarefree.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    result = 1
    for p in _squarefree_factorization(n):
        result *= p - nu(dset, p)
    return result


def _primorial_of_bound(y: int) -> int:
    """Product of all primes <= y as an exact integer."""
    table = prime_table(y)
    i1 = int(np.searchsorted(table, y, side="right"))
    out = 1
    for p in table[:i1]:
        out *= int(p)
    return out


def _exact_factor(dset: OffsetSet, p: int) -> float:
    nv = nu(dset, p)
    return (1.0 - 1.0 / p) ** (-dset.k) * (1.0 - nv / p)


def sigma_truncated(dset: OffsetSet, y: int, method: str = "both") -> SingularValue:
    """Truncated singular series: the product over primes p <= y only.

    method "both" (default) computes the direct product and the totient
    route and insists they agree to relative 1e-12; "direct" or "totient"
    selects a single route. The totient route is capped at y <= 20000 by
    the big-integer budget; the direct route has no such cap.
    """
    if y < 2:
        raise DomainError(f"truncation point must be >= 2, got {y}")
    if method not in ("both", "direct", "totient"):
        raise DomainError(f"unknown method {method!r}")
    witness = _zero_witness(dset)
    if witness is not None and witness <= y:
        return SingularValue(0.0, truncation_y=y, zero_witness=witness)

    want_totient = method in ("both", "totient")
    if want_totient and y > TOTIENT_MAX_Y:
        raise CapacityError(
            f"totient route needs the product of all primes <= {y}, beyond "
            f"the budget y <= {TOTIENT_MAX_Y}; use method='direct'"
        )

    k = dset.k
    table = prime_table(y)
    i1 = int(np.searchsorted(table, y, side="right"))
    primes = table[:i1]

    direct = None
    if method in ("both", "direct"):
        # Exact factors where nu can fall short of k, generic elsewhere.
        bound = max(dset.spread, k)
        split = int(np.searchsorted(primes, bound, side="right"))
        head = math.prod(_exact_factor(dset, int(p)) for p in primes[:split])
        tail_p = primes[split:].astype(np.float64)
        logs = -k * np.log1p(-1.0 / tail_p) + np.log1p(-k / tail_p)
        direct = head * float(np.exp(np.sum(logs, dtype=np.longdouble)))

    totient = None
    if want_totient:
        psharp = _primorial_of_bound(y)
        phi = 1
        for p in primes:
            phi *= int(p) - nu(dset, int(p))
        ratio = float(Fraction(phi, psharp))
        pf = primes.astype(np.float64)
        mertens = float(
            np.exp(np.sum(-k * np.log1p(-1.0 / pf), dtype=np.longdouble))
        )
        totient = ratio * mertens

    if direct is not None and totient is not None:
        if not math.isclose(direct, totient, rel_tol=_MATCH_RTOL, abs_tol=0.0):
            raise InternalCheckError(
                f"truncated-series routes disagree at y={y} for "
                f"{dset.offsets}: direct={direct!r} totient={totient!r}"
            )
    value = direct if direct is not None else totient
    exact = tuple(int(p) for p in primes[: min(i1, 64)])
    return SingularValue(value, truncation_y=y, exact_primes=exact)


@lru_cache(maxsize=200_000)
def _sigma_cached(offsets: tuple[int, ...], rel_tolerance: float) -> SingularValue:
    dset = OffsetSet(offsets)
    k = dset.k
    witness = _zero_witness(dset)
    if witness is not None:
        return SingularValue(0.0, zero_witness=witness, exact_primes=(witness,))
    if k == 1:
        return SingularValue(1.0)  # every factor is identically 1

    exact: set[int] = set(_primes_through(k))
    offs = dset.offsets
    for i, a in enumerate(offs):
        for b in offs[i + 1 :]:
            exact.update(distinct_prime_factors(b - a))

    y = _cutoff_for(k, rel_tolerance)
    value = _generic_constant(k, y)
    for p in sorted(exact):
        f = _exact_factor(dset, p)
        if p > k:
            g = (1.0 - 1.0 / p) ** (-k) * (1.0 - k / p)
            value *= f / g
        else:
            value *= f
    return SingularValue(
        value,
        exact_primes=tuple(sorted(exact)),
        tail_bound=_generic_tail_bound(k, y),
    )


def sigma(dset: OffsetSet, rel_tolerance: float = 1e-8) -> SingularValue:
    """Full singular series of an offset set, to a relative tolerance.

    Primes dividing the discriminant (or not exceeding k) get exact
    factors; the remaining generic product is taken to a cutoff at which
    the analytic tail bound drops below rel_tolerance.
    """
    if not 0 < rel_tolerance < 1e-2:
        raise DomainError(
            f"rel_tolerance must be in (0, 1e-2), got {rel_tolerance}"
        )
    return _sigma_cached(dset.offsets, rel_tolerance)
