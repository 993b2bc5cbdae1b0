import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmfmoments.errors import ResourceLimitError
from rmfmoments.rmt import (
    I1_two_ways,
    MagicSquareSpec,
    haar_unitary_secular,
    hyper_Fk,
    magic_count,
    mc_truncated_moment,
    so_asymptotic_rhs,
    so_truncated_coefficients,
    so_truncated_moment_exact,
    unitary_asymptotic_rhs,
    unitary_truncated_coefficients,
    unitary_truncated_moment_exact,
)

SQRT_E = math.exp(0.5)


# --- exact truncated moments -------------------------------------------------


def test_unitary_k1_coefficients_all_one():
    for L in (0, 1, 5, 50):
        assert unitary_truncated_coefficients(1, L) == (1,) * (L + 1)


def test_unitary_k1_moment_is_geometric_sum():
    for L in (3, 17, 50):
        z = 1.3
        w = z * z
        expected = (w ** (L + 1) - 1) / (w - 1)
        assert unitary_truncated_moment_exact(1, L, z) == pytest.approx(expected, rel=1e-13)


def test_unitary_k2_frozen_coefficients():
    assert unitary_truncated_coefficients(2, 1) == (1, 4, 2)
    assert unitary_truncated_coefficients(2, 2) == (1, 4, 10, 8, 3)


def test_so_k1_moment_is_geometric_sum():
    for L in (2, 10, 40):
        z = 2.0
        w = z * z
        expected = (w ** (L + 1) - 1) / (w - 1)
        assert so_truncated_moment_exact(1, L, z) == pytest.approx(expected, rel=1e-13)


def test_so_k2_frozen_coefficients():
    assert so_truncated_coefficients(2, 1) == (1, 6, 3)
    assert so_truncated_coefficients(2, 2) == (1, 6, 21, 22, 6)


def brute_unitary_coefficients(k, L):
    """Walk ordered degree tuples directly.

    The s-th coefficient sums, over ordered pairs of k-tuples of degrees
    <= L with common total s, the number of nonnegative integer matrices
    whose row sums are the first tuple and column sums the second.
    """
    from rmfmoments.polytopes import count_margin_matrices

    out = [0] * (k * L + 1)
    for rows in product(range(L + 1), repeat=k):
        for cols in product(range(L + 1), repeat=k):
            if sum(rows) == sum(cols):
                out[sum(rows)] += count_margin_matrices(rows, cols)
    return out


@pytest.mark.parametrize("k,L", [(2, 1), (2, 2), (2, 3), (3, 2)])
def test_unitary_coefficients_against_margin_walk(k, L):
    assert tuple(brute_unitary_coefficients(k, L)) == unitary_truncated_coefficients(k, L)


def test_exact_and_float_paths_agree():
    for k, L, z in ((2, 12, 1.7), (3, 9, 1.2), (2, 25, SQRT_E)):
        exact = unitary_truncated_moment_exact(k, L, z)
        coeffs = unitary_truncated_coefficients(k, L)
        direct = math.fsum(c * z ** (2 * s) for s, c in enumerate(coeffs))
        assert exact == pytest.approx(direct, rel=1e-12)


def test_so_exact_and_coefficients_agree():
    k, L, z = 2, 6, 1.9
    coeffs = so_truncated_coefficients(k, L)
    direct = math.fsum(c * z ** (2 * s) for s, c in enumerate(coeffs))
    assert so_truncated_moment_exact(k, L, z) == pytest.approx(direct, rel=1e-12)


def test_coefficient_caps_enforced():
    with pytest.raises(ResourceLimitError):
        unitary_truncated_moment_exact(2, 400, 1.5)
    with pytest.raises(ResourceLimitError):
        so_truncated_moment_exact(3, 30, 1.5)


def test_moment_rejects_z_inside_unit_disk():
    with pytest.raises(ValueError):
        unitary_truncated_moment_exact(2, 5, 0.9)


# --- special functions -------------------------------------------------------


def test_hyper_one_is_constant():
    assert hyper_Fk(1, 1.4) == 1.0
    assert hyper_Fk(1, 9.0) == 1.0


def test_hyper_two_frozen():
    assert hyper_Fk(2, SQRT_E) == pytest.approx(0.6839397205857212, rel=1e-13)


def test_hyper_two_closed_form():
    # k=2 terminates after two terms: 1 - (1 - z^-2)/2
    z = 1.7
    assert hyper_Fk(2, z) == pytest.approx(1.0 - (1.0 - z**-2) / 2.0, rel=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("z", [1.1, 2.0, 5.0])
def test_contour_integral_two_routes(k, z):
    residue, closed = I1_two_ways(k, z)
    assert residue == pytest.approx(closed, rel=1e-10)


def test_magic_counts():
    assert magic_count(MagicSquareSpec((1, 1), (1, 1))) == 2
    assert magic_count(MagicSquareSpec((2, 1), (2, 1))) == 2
    assert magic_count(MagicSquareSpec((2,), (1, 1))) == 1
    assert magic_count(MagicSquareSpec((1,), (2,))) == 0


# --- Haar sampling -----------------------------------------------------------


def test_secular_sample_shape_and_endpoints():
    rng = np.random.default_rng(12345)
    s = haar_unitary_secular(8, rng)
    assert s.coefficients.shape == (9,)
    assert s.coefficients[0] == pytest.approx(1.0)
    # c_N is (-1)^N det(U), modulus one
    assert abs(s.coefficients[8]) == pytest.approx(1.0, abs=1e-10)
    assert not s.flagged


def test_secular_sample_deterministic():
    a = haar_unitary_secular(6, np.random.default_rng(99))
    b = haar_unitary_secular(6, np.random.default_rng(99))
    assert np.array_equal(a.coefficients, b.coefficients)


def test_secular_polynomial_matches_determinant():
    # sum_m c_m z^m must equal det(I + z U) for the sampled U; rebuild U
    # with the same stream and compare at a few points
    rng = np.random.default_rng(4242)
    g = (rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    u = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    sample_rng = np.random.default_rng(4242)
    s = haar_unitary_secular(5, sample_rng)
    for z in (0.3, -0.7 + 0.2j, 1.1j):
        direct = np.linalg.det(np.eye(5) + z * u)
        series = sum(c * z**m for m, c in enumerate(s.coefficients))
        assert series == pytest.approx(direct, rel=1e-10)


@given(st.integers(min_value=1, max_value=16))
@settings(max_examples=25, deadline=None)
def test_secular_first_coefficient_is_minus_trace(n):
    rng = np.random.default_rng(1000 + n)
    s = haar_unitary_secular(n, rng)
    # |c_1| = |tr U| <= N always
    assert abs(s.coefficients[1]) <= n + 1e-9


def test_secular_rejects_bad_n():
    with pytest.raises(ValueError):
        haar_unitary_secular(0, np.random.default_rng(1))
    with pytest.raises(ValueError):
        haar_unitary_secular(65, np.random.default_rng(1))


# --- Monte Carlo moments -----------------------------------------------------


def test_mc_matches_exact_k1():
    est = mc_truncated_moment("unitary", 1, 2, 1.5, N=4, samples=4000, seed=5)
    exact = unitary_truncated_moment_exact(1, 2, 1.5)
    assert abs(est.mean - exact) <= 3 * est.stderr


def test_mc_thread_count_does_not_change_stream():
    a = mc_truncated_moment("unitary", 1, 2, 1.5, N=4, samples=600, seed=5, threads=1)
    b = mc_truncated_moment("unitary", 1, 2, 1.5, N=4, samples=600, seed=5, threads=4)
    assert a.mean == b.mean
    assert a.stderr == b.stderr


def test_mc_requires_enough_matrix():
    with pytest.raises(ValueError):
        mc_truncated_moment("unitary", 2, 5, 1.5, N=8, samples=500, seed=1)


# --- asymptotic reference curves --------------------------------------------


def test_unitary_rhs_k1_closed_form():
    z, L = 1.8, 12
    expected = z ** (2 * L) / (1 - z**-2)
    assert unitary_asymptotic_rhs(1, L, z) == pytest.approx(expected, rel=1e-13)


def test_unitary_ratio_improves_with_L():
    z = SQRT_E
    r10 = unitary_truncated_moment_exact(2, 10, z) / unitary_asymptotic_rhs(2, 10, z)
    r40 = unitary_truncated_moment_exact(2, 40, z) / unitary_asymptotic_rhs(2, 40, z)
    assert r10 == pytest.approx(0.91419, abs=5e-5)
    assert r40 == pytest.approx(0.97854, abs=5e-5)
    assert abs(r40 - 1) < abs(r10 - 1)


def test_so_ratio_improves_with_L():
    z = 2.0
    ratios = [
        so_truncated_moment_exact(2, L, z) / so_asymptotic_rhs(2, L, z)
        for L in (8, 12, 16, 20)
    ]
    assert ratios == sorted(ratios)
    assert ratios[0] == pytest.approx(0.83506, abs=5e-5)
    assert ratios[-1] == pytest.approx(0.92649, abs=5e-5)
    assert all(0 < r < 1 for r in ratios)
