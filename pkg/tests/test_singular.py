import math
import random
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from championlab.errors import CapacityError, DomainError
from championlab.singular import (
    OffsetSet,
    nu,
    phi_tuple,
    sigma,
    sigma_pair,
    sigma_truncated,
    twin_prime_constant,
    _c2_at_cutoff,
)

from oracles import brute_phi, exact_truncated_series, simple_sieve

C2_REFERENCE = 0.6601618158468696  # independently published, 16 digits

offset_sets = st.sets(st.integers(min_value=0, max_value=60), min_size=1, max_size=4)


# ---------------------------------------------------------------- OffsetSet

def test_offset_set_validation():
    assert OffsetSet.of([6, 0, 2]).offsets == (0, 2, 6)
    with pytest.raises(DomainError):
        OffsetSet(())
    with pytest.raises(DomainError):
        OffsetSet((2, 2))
    with pytest.raises(DomainError):
        OffsetSet.of([-1, 3])


def test_discriminant_exact():
    d = OffsetSet.of([0, 2, 6])
    assert d.discriminant() == 2 * 6 * 4
    big = OffsetSet.of([0, 10**6, 2 * 10**6])
    assert big.discriminant() == 10**6 * 2 * 10**6 * 10**6


# ----------------------------------------------------------------------- nu

def test_nu_examples():
    assert nu(OffsetSet.of([0, 2, 4]), 3) == 3
    assert nu(OffsetSet.of([0, 2, 6]), 3) == 2
    assert nu(OffsetSet.of([0, 6]), 3) == 1
    assert nu(OffsetSet.of([0, 6]), 5) == 2
    with pytest.raises(DomainError):
        nu(OffsetSet.of([0, 2]), 4)


@given(offset_sets, st.sampled_from([2, 3, 5, 7, 11, 13, 61, 67]))
@settings(max_examples=200)
def test_nu_properties(offsets, p):
    dset = OffsetSet.of(offsets)
    v = nu(dset, p)
    assert 1 <= v <= min(p, dset.k)
    assert v == len({d % p for d in dset.offsets})
    # nu falls short of k exactly when p divides the discriminant
    assert (v < dset.k) == (dset.k > 1 and dset.discriminant() % p == 0)


# --------------------------------------------------------- twin prime constant

def test_c2_examples():
    assert round(twin_prime_constant(1e-5), 5) == 0.66016
    loose = twin_prime_constant(1e-1)
    assert 0.56016 < loose < 0.76016
    tight = twin_prime_constant(1e-9)
    assert abs(tight - C2_REFERENCE) < 1e-9


def test_c2_doubling_stability():
    y = 1 << 26
    assert abs(_c2_at_cutoff(2 * y) - _c2_at_cutoff(y)) < 1e-9


def test_c2_tolerance_domain():
    with pytest.raises(DomainError):
        twin_prime_constant(0.7)
    with pytest.raises(DomainError):
        twin_prime_constant(0.0)
    with pytest.raises(CapacityError):
        twin_prime_constant(1e-12)  # needs primes beyond the table budget


# ----------------------------------------------------------------- sigma_pair

def test_sigma_pair_examples():
    assert sigma_pair(2).value == pytest.approx(2 * C2_REFERENCE, rel=1e-7)
    assert sigma_pair(6).value == pytest.approx(4 * C2_REFERENCE, rel=1e-7)
    seven = sigma_pair(7)
    assert seven.value == 0.0 and seven.zero_witness == 2
    assert sigma_pair(30).value == pytest.approx(16 / 3 * C2_REFERENCE, rel=1e-7)
    # the ratio is exactly rational; C2 cancels
    assert sigma_pair(30).value / sigma_pair(6).value == pytest.approx(4 / 3, rel=1e-14)
    with pytest.raises(DomainError):
        sigma_pair(0)


def test_sigma_pair_exceeds_one_for_even_gaps():
    for d in range(2, 600, 2):
        assert sigma_pair(d).value > 1.0


def test_sigma_pair_against_multiplicative_sieve():
    # Independent route: build sigma(d)/(2 C2) for all d <= N by one
    # multiplicative pass, then compare pointwise.
    N = 5000
    rel = np.ones(N + 1)
    for p in simple_sieve(N):
        if p > 2:
            rel[p::p] *= (p - 1) / (p - 2)
    for d in range(2, N + 1, 2):
        assert sigma_pair(d).value == pytest.approx(
            2 * twin_prime_constant() * rel[d], rel=1e-12
        )


# ------------------------------------------------------------------ phi_tuple

def test_phi_examples():
    assert phi_tuple(30, OffsetSet.of([0])) == 8
    assert phi_tuple(30, OffsetSet.of([0, 2])) == 3
    assert phi_tuple(2, OffsetSet.of([0, 1])) == 0
    assert phi_tuple(1, OffsetSet.of([0, 5])) == 1


def test_phi_rejects_non_squarefree():
    with pytest.raises(DomainError):
        phi_tuple(12, OffsetSet.of([0, 2]))
    with pytest.raises(DomainError):
        phi_tuple(49, OffsetSet.of([0]))


@given(offset_sets, st.sampled_from([2, 6, 30, 210, 2310]))
@settings(max_examples=150, deadline=None)
def test_phi_matches_brute_force(offsets, n):
    dset = OffsetSet.of(offsets)
    assert phi_tuple(n, dset) == brute_phi(n, dset.offsets)


# ------------------------------------------------------------ sigma_truncated

def test_truncated_hand_examples():
    pair = OffsetSet.of([0, 2])
    assert sigma_truncated(pair, 2).value == pytest.approx(2.0, rel=1e-14)
    assert sigma_truncated(pair, 3).value == pytest.approx(1.5, rel=1e-14)
    zero = sigma_truncated(OffsetSet.of([0, 2, 4]), 3)
    assert zero.value == 0.0 and zero.zero_witness == 3
    # below the witness prime the truncated product is still positive
    assert sigma_truncated(OffsetSet.of([0, 2, 4]), 2).value > 0


@given(offset_sets, st.sampled_from([2, 3, 5, 7, 11, 13]))
@settings(max_examples=150, deadline=None)
def test_truncated_routes_and_exact_value(offsets, y):
    dset = OffsetSet.of(offsets)
    got = sigma_truncated(dset, y)  # method="both" cross-checks internally
    exact = exact_truncated_series(dset.offsets, y, simple_sieve(y))
    if exact == 0:
        assert got.value == 0.0
    else:
        assert got.value == pytest.approx(float(exact), rel=1e-12)


def test_truncated_totient_budget():
    pair = OffsetSet.of([0, 2])
    with pytest.raises(CapacityError, match="direct"):
        sigma_truncated(pair, 100_000)
    direct = sigma_truncated(pair, 100_000, method="direct")
    assert direct.value > 1.3  # converging toward 2 C2
    with pytest.raises(DomainError):
        sigma_truncated(pair, 1)


# ---------------------------------------------------------------------- sigma

def test_sigma_matches_pair_route():
    assert sigma(OffsetSet.of([0, 2]), 1e-8).value == pytest.approx(
        sigma_pair(2).value, rel=2e-8
    )


def test_sigma_pair_equivalence_full_range():
    for d in range(2, 10_001, 2):
        full = sigma(OffsetSet.of([0, d]), 1e-8).value
        closed = sigma_pair(d).value
        assert full == pytest.approx(closed, rel=5e-8), f"d={d}"


def test_sigma_triple_regression():
    s = sigma(OffsetSet.of([0, 2, 6]), 1e-8)
    assert s.value == pytest.approx(2.8582486, abs=5e-8)
    assert s.tail_bound < 1e-8
    assert 3 in s.exact_primes
    # translation of the same difference pattern
    assert sigma(OffsetSet.of([0, 4, 6]), 1e-8).value == pytest.approx(s.value, rel=1e-12)


def test_sigma_zero_and_unit_cases():
    z = sigma(OffsetSet.of([0, 2, 4]), 1e-8)
    assert z.value == 0.0 and z.zero_witness == 3 and z.is_zero
    assert sigma(OffsetSet.of([0]), 1e-8).value == 1.0
    with pytest.raises(DomainError):
        sigma(OffsetSet.of([0, 2]), 0.1)


def test_sigma_zero_characterization():
    rng = random.Random(12345)
    for _ in range(300):
        k = rng.randint(1, 4)
        offsets = OffsetSet.of(rng.sample(range(0, 61), k))
        expected_zero = any(
            len({d % p for d in offsets.offsets}) == p
            for p in (2, 3)
            if p <= offsets.k
        )
        assert sigma(offsets, 1e-6).is_zero == expected_zero


def test_champion_monotone_structure():
    # sigma increases most rapidly on primorials: below each primorial
    # every even gap has a strictly smaller pair series. Checked
    # exhaustively below p_7# = 510510 on an independent multiplicative
    # sieve of the ratios sigma(d) / (2 C2).
    N = 510_510
    rel = np.ones(N + 1)
    for p in simple_sieve(N):
        if p > 2:
            rel[p::p] *= (p - 1) / (p - 2)
    for P in (6, 30, 210, 2310, 30030, 510510):  # no even d precedes 2
        assert rel[2:P:2].max() < rel[P]
    # spot-check the sieve against the closed form
    for d in (2, 90, 30030, 510508):
        assert 2 * twin_prime_constant() * rel[d] == pytest.approx(
            sigma_pair(d).value, rel=1e-12
        )


def test_sigma_growth_guard():
    # max sigma(d) for even d <= h stays within a fitted multiple of
    # log log h (regression guard for the double-log growth scale).
    N = 510_510
    rel = np.ones(N + 1)
    for p in simple_sieve(N):
        if p > 2:
            rel[p::p] *= (p - 1) / (p - 2)
    c2 = twin_prime_constant()
    for h in (100, 1000, 10_000, 100_000, 510_510):
        peak = (2 * c2 * rel[2 : h + 1 : 2]).max()
        assert peak <= 2.5 * math.log(math.log(h))


def test_constants_thread_safe():
    with ThreadPoolExecutor(max_workers=8) as pool:
        values = list(pool.map(lambda _: twin_prime_constant(), range(16)))
    assert len(set(values)) == 1
