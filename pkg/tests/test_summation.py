import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cachemix.summation import harmonic_sum, harmonic_tail, power_law_sum


def brute(alpha, n):
    k = np.arange(1, n + 1, dtype=np.float64)
    return math.fsum(k ** -alpha)


def test_small_examples():
    assert harmonic_sum(0.8, 1) == 1.0
    direct = 1 + 2**-0.8 + 3**-0.8 + 4**-0.8
    assert harmonic_sum(0.8, 4) == pytest.approx(direct, abs=1e-15)
    assert harmonic_sum(0.8, 4) == pytest.approx(2.31947, abs=1e-5)


@pytest.mark.parametrize("alpha", [0.5, 0.8, 1.0, 1.2, 2.0])
@pytest.mark.parametrize("n", [10**5, 3 * 10**6])
def test_euler_maclaurin_against_exact(alpha, n):
    # a tiny head forces almost the whole sum through the tail formula
    assert harmonic_sum(alpha, n, head=1000) == pytest.approx(brute(alpha, n), rel=1e-12)


def test_alpha_one_is_log_like():
    h = harmonic_sum(1.0, 10**11)
    assert h == pytest.approx(math.log(1e11) + 0.5772156649015329 + 0.5e-11, rel=1e-12)


def test_zeta_limit():
    # H(2, inf) = pi^2 / 6, tail after N is ~1/N
    assert harmonic_sum(2.0, 10**12) == pytest.approx(math.pi**2 / 6 - 1e-12, rel=1e-13)


def test_tail_empty_range():
    assert harmonic_tail(0.8, 10, 9) == 0.0


@pytest.mark.parametrize("bad", [(0.8, 0), (-0.1, 10)])
def test_rejects_bad_arguments(bad):
    with pytest.raises(ValueError):
        harmonic_sum(*bad)


@given(st.floats(0.1, 2.5), st.integers(1, 10**9))
def test_monotone_in_n(alpha, n):
    assert harmonic_sum(alpha, n + 1) >= harmonic_sum(alpha, n)


@given(st.floats(0.1, 2.0), st.integers(2, 10**10))
def test_decreasing_in_alpha(alpha, n):
    assert harmonic_sum(alpha + 0.05, n) < harmonic_sum(alpha, n)


@pytest.mark.parametrize("alpha", [0.8, 1.2])
@pytest.mark.parametrize("t", [1e2, 1e5, 1e8])
def test_power_law_sum_occupancy_kernel(alpha, t):
    n = 2 * 10**6
    scale = 1.0 / brute(alpha, n)
    q = scale * np.arange(1, n + 1, dtype=np.float64) ** -alpha
    exact = math.fsum(-np.expm1(-q * t))
    got = power_law_sum(lambda x: -np.expm1(-x * t), scale, alpha, n)
    assert got == pytest.approx(exact, rel=1e-11)


def test_power_law_sum_filtered_rates():
    # layer-2 kernel: rates q exp(-q T1)
    n, alpha, t1, t2 = 10**6, 0.8, 3e4, 2e5
    scale = 1.0 / brute(alpha, n)
    q = scale * np.arange(1, n + 1, dtype=np.float64) ** -alpha
    f = lambda x: -np.expm1(-(x * np.exp(-x * t1)) * t2)
    assert power_law_sum(f, scale, alpha, n) == pytest.approx(math.fsum(f(q)), rel=1e-11)
