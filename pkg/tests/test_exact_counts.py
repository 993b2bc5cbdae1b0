import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmfmoments.exact_counts import (
    char_moment_average,
    congruence_count,
    product_multiplicity_map,
    rademacher_moment_sign_enum,
    rademacher_moment_tuple_count,
    steinhaus_energy,
)


def brute_energy(k, x, sigma=0.0):
    """Count 2k-tuples with equal half-products, weighting by n^(-2 sigma)."""
    counts = {}
    for tup in product(range(1, x + 1), repeat=k):
        n = math.prod(tup)
        counts[n] = counts.get(n, 0) + 1
    if sigma == 0.0:
        return sum(c * c for c in counts.values())
    return math.fsum(n ** (-2.0 * sigma) * c * c for n, c in counts.items())


# --- multiplicity map --------------------------------------------------------


@given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=12))
@settings(max_examples=60, deadline=None)
def test_map_totals_and_extremes(k, x):
    mm = product_multiplicity_map(k, x)
    assert mm.total_tuples == x**k
    assert mm.count(1) == 1
    # the largest product is hit exactly once
    assert mm.count(x**k) == 1
    assert mm.count(x**k + 1) == 0


def test_map_values_sorted_strictly():
    mm = product_multiplicity_map(3, 9)
    vals = mm.values.tolist()
    assert vals == sorted(set(vals))


# --- Steinhaus energy --------------------------------------------------------


def test_energy_k1_is_floor_x():
    for x in (1, 2, 17, 999, 1000):
        assert steinhaus_energy(1, x).value == x
    assert steinhaus_energy(1, 7.9).value == 7


def test_energy_anchor_values():
    assert steinhaus_energy(2, 2).value == 6
    assert steinhaus_energy(2, 3).value == 15


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("x", [2, 4, 6])
def test_energy_matches_brute_force(k, x):
    assert steinhaus_energy(k, x).value == brute_energy(k, x)


def test_energy_weighted_matches_brute_force():
    got = steinhaus_energy(2, 5, sigma=0.25).value
    assert got == pytest.approx(brute_energy(2, 5, 0.25), rel=1e-12)


def test_energy_monotone_in_x():
    prev = 0
    for x in range(1, 30):
        cur = steinhaus_energy(2, x).value
        assert cur > prev
        prev = cur


def test_energy_k2_fast_path_agrees_with_map_path():
    # the totient identity kicks in above the cutoff; compare both routes
    # just on either side of it and at a couple of awkward x
    for x in (10, 137, 1999):
        mm = product_multiplicity_map(2, x)
        direct = sum(int(c) * int(c) for c in mm.counts.tolist())
        assert steinhaus_energy(2, x).value == direct


def test_energy_k2_large_frozen():
    assert steinhaus_energy(2, 10**4).value == 1069018560


def test_energy_floor_semantics():
    assert steinhaus_energy(2, 7.9).value == steinhaus_energy(2, 7).value


def test_energy_rejects_bad_input():
    with pytest.raises(ValueError):
        steinhaus_energy(0, 10)
    with pytest.raises(ValueError):
        steinhaus_energy(2, 10, sigma=0.6)
    with pytest.raises(ValueError):
        steinhaus_energy(2, 0.5)


# --- Rademacher moments ------------------------------------------------------


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("x", [2, 5, 11, 20])
def test_sign_enum_equals_tuple_count(k, x):
    assert rademacher_moment_sign_enum(k, x) == rademacher_moment_tuple_count(k, x)


def test_rademacher_anchor_values():
    assert rademacher_moment_tuple_count(2, 3) == 21
    assert rademacher_moment_sign_enum(2, 3) == 21
    assert rademacher_moment_tuple_count(2, 30) == 1933


def test_rademacher_frozen_large():
    assert rademacher_moment_tuple_count(2, 500) == 870432
    assert rademacher_moment_tuple_count(2, 1000) == 3785648


def test_rademacher_k1_counts_squarefull_free_pairs():
    # 2nd moment: pairs (m, n) of squarefree m, n <= x with mn a square,
    # which forces m = n
    for x in (1, 4, 10, 30):
        expected = sum(
            1 for n in range(1, x + 1) if all(n % (p * p) for p in range(2, int(n**0.5) + 1))
        )
        assert rademacher_moment_tuple_count(1, x) == expected


def test_sign_enum_guard():
    # the sign enumeration walks all squarefree supports, so it refuses
    # once more than 24 primes would be involved
    from rmfmoments.errors import ResourceLimitError

    with pytest.raises(ResourceLimitError):
        rademacher_moment_sign_enum(2, 200)


# --- character averages ------------------------------------------------------


@pytest.mark.parametrize("q", [5, 11, 101])
@pytest.mark.parametrize("k", [1, 2])
def test_char_average_equals_congruence_count(q, k):
    x = min(10, int(math.isqrt(q)) + 2)
    res = char_moment_average(k, q, x)
    assert res.avg_all == Fraction(congruence_count(k, q, x))
    assert res.float_error < 1e-6


def test_char_average_frozen():
    res = char_moment_average(2, 101, 10)
    assert res.avg_all == 278
    assert congruence_count(2, 101, 10) == 278


def test_char_average_nonprincipal_consistency():
    # phi * avg_all = principal term + (phi - 1) * avg_nonprincipal
    res = char_moment_average(2, 11, 3)
    phi = 10
    principal = sum(1 for n in range(1, 4) if n % 11)  # all of 1..3
    lhs = res.avg_all * phi
    rhs = principal ** (2 * 2) + (phi - 1) * res.avg_nonprincipal
    assert lhs == rhs


def test_congruence_count_small_brute():
    # direct walk over residue tuples for a tiny case
    q, k, x = 7, 2, 3
    total = 0
    for tup in product(range(1, x + 1), repeat=2 * k):
        lhs = tup[0] * tup[1] % q
        rhs = tup[2] * tup[3] % q
        if lhs == rhs:
            total += 1
    assert congruence_count(k, q, x) == total


def test_char_average_requires_prime_modulus():
    with pytest.raises(ValueError):
        char_moment_average(2, 12, 3)
