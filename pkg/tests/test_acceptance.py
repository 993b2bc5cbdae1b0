"""Acceptance gate: every numbered criterion must hold at its stated tolerance.

Each test runs one criterion through the same machinery the ``verify``
subcommand uses and prints the one-line verdict, so a verbose pytest run
doubles as the acceptance report.  Three extra tests at the bottom pin
literal tabulated readings that the computed values contradict; they are
marked strict-xfail on purpose, see the criterion flags for the story.
"""

import math

import pytest

from rmfmoments.acceptance import run_criterion


def check(number):
    res = run_criterion(number)
    line = f"criterion {number:02d} {'PASS' if res.passed else 'FAIL'} ({res.seconds:.2f}s) {res.title}: {res.detail}"
    print(line)
    for flag in res.flags:
        print(f"  flag: {flag}")
    assert res.passed, line
    return res


def test_criterion_01_euler_products():
    res = check(1)
    assert res.seconds < 10


def test_criterion_02_volume_constants():
    res = check(2)
    assert res.seconds < 120


def test_criterion_03_exact_energy():
    check(3)


def test_criterion_04_energy_trend():
    res = check(4)
    assert res.seconds < 300


def test_criterion_05_sign_routes():
    check(5)


def test_criterion_06_character_averages():
    check(6)


def test_criterion_07_matrix_dp_anchors():
    check(7)


def test_criterion_08_contour_routes():
    check(8)


def test_criterion_09_haar_sampling():
    res = check(9)
    assert res.seconds < 120


def test_criterion_10_unitary_trend():
    check(10)


def test_criterion_11_simulation_moments():
    check(11)


def test_criterion_12_first_moment_table():
    check(12)


def test_criterion_13_amplitude_bound():
    check(13)


def test_criterion_14_count_vs_matrix_model():
    check(14)


# --- literal tabulated readings the computed values contradict ---------------


@pytest.mark.xfail(
    reason="half-integer Euler product: the five-digit table entry 0.98849 "
    "disagrees with the converged product 0.98836 by 1.3e-4",
    strict=True,
)
def test_tabulated_half_integer_product_digits():
    from rmfmoments.arith import a_constant

    assert abs(a_constant(0.5).value - 0.98849) <= 5e-5


@pytest.mark.xfail(
    reason="quarter-power reference: (e/(e-1))^(1/4) is 1.12150, the "
    "tabulated 1.21250 transposes the leading digits",
    strict=True,
)
def test_tabulated_quarter_power_digits():
    value = (math.e / (math.e - 1)) ** 0.25
    assert abs(value - 1.21250) <= 1e-5


@pytest.mark.xfail(
    reason="fourth-moment trend: the stated comparison constant 6/pi^2 is "
    "half the pipeline value 12/pi^2; against 6/pi^2 the x=1e4 ratio "
    "sits near 1.9 and the stated band fails",
    strict=True,
)
def test_fourth_moment_band_with_halved_constant():
    from rmfmoments.exact_counts import steinhaus_energy

    x = 10**4
    ratio = steinhaus_energy(2, x).value / (6 / math.pi**2 * x**2 * math.log(x))
    assert 0.7 <= ratio <= 1.4
