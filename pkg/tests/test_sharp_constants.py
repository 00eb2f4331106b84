import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adamslab import sharp_constants as sc

PI = math.pi
CHAIN_B2 = 32 / (729 * PI**2)


def test_young_constant_values():
    assert sc.young_constant(2) == pytest.approx(1.0, rel=1e-15)
    assert sc.young_constant(4 / 3) == pytest.approx(0.936687, abs=1e-6)
    assert sc.young_constant(4) == pytest.approx(1.0676, abs=1e-5)


@pytest.mark.parametrize("t", [4 / 3, 1.5, 2, 3, 4, 10])
def test_young_conjugacy(t):
    assert sc.young_constant(t) * sc.young_constant(t / (t - 1)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("bad", [1.0, 0.5, -2])
def test_young_rejects(bad):
    with pytest.raises(ValueError):
        sc.young_constant(bad)


@pytest.mark.parametrize("j", [2, 3, 4])
def test_kernel_integral_closed_form_and_quadrature(j):
    closed = sc.kernel_integral(j)
    assert closed == pytest.approx((j - 1) / (32 * PI**2), rel=1e-15)
    assert sc.kernel_integral(j, method="quadrature") == pytest.approx(closed, rel=1e-8)


def test_kernel_integral_rejects():
    with pytest.raises(ValueError):
        sc.kernel_integral(1.0)
    with pytest.raises(ValueError):
        sc.kernel_integral(2, method="monte-carlo")


def test_chain_j2():
    assert sc.chain_a_factor(2) == pytest.approx(16 / 27, rel=1e-14)
    assert sc.cj_chain_upper(2) == pytest.approx(16 / (27 * math.sqrt(32) * PI), rel=1e-14)
    assert sc.bj_from_cj(2, sc.cj_chain_upper(2)) == pytest.approx(CHAIN_B2, rel=1e-10)
    c3 = sc.cj_chain_upper(3)
    assert 0 < c3 < math.inf


def test_chain_rejects():
    with pytest.raises(ValueError):
        sc.cj_chain_upper(1)
    with pytest.raises(ValueError):
        sc.cj_chain_upper(2.5)


def test_bj_from_cj_arithmetic():
    assert sc.bj_from_cj(2, 1.0) == 4.0
    assert sc.bj_from_cj(3, 1.0) == pytest.approx(27 / 4)
    with pytest.raises(ValueError):
        sc.bj_from_cj(2, 0.0)


def test_formula_k2_both_readings():
    assert sc.bk_formula_upper(2, reading="display") == pytest.approx(2401 / (5832 * PI**2), rel=1e-12)
    assert sc.bk_formula_upper(2, reading="display") / CHAIN_B2 == pytest.approx(9.38, abs=0.01)
    # the proof's own rewrite of the first factor gives back the chain value
    assert sc.bk_formula_upper(2) == pytest.approx(CHAIN_B2, rel=1e-12)


def test_formula_asymptotic_k50():
    ratio = sc.bk_formula_upper(50) / sc.bk_asymptotic(50)
    assert 0.5 <= ratio <= 2
    assert ratio == pytest.approx(1.005, abs=1e-3)


@pytest.mark.parametrize("k", [3, 10, 20])
def test_formula_log_space_agrees(k):
    for reading in sc.READINGS:
        direct = sc.bk_formula_upper(k, reading)
        assert math.log(direct) == pytest.approx(sc.log_bk_formula_upper(k, reading), rel=1e-12)


def test_formula_large_k_finite():
    v = sc.log_bk_formula_upper(5000)
    assert math.isfinite(v)
    with pytest.raises(ValueError):
        sc.bk_formula_upper(1)
    with pytest.raises(ValueError):
        sc.bk_formula_upper(3, reading="other")


def test_trial_quotient():
    q3 = sc.trial_quotient(3)
    assert 0 < q3 < CHAIN_B2
    for g in (3, 5, 20):
        assert sc.trial_quotient(g, method="quadrature") == pytest.approx(sc.trial_quotient(g), rel=1e-8)
    with pytest.raises(ValueError):
        sc.trial_quotient(2)


def test_trial_family_limit_below_gaussian():
    # the family tends to the quotient of e^{-r}, which is 2/3 of the Gaussian value
    lim = sc.trial_family_limit()
    assert lim == pytest.approx(2 / 3 * sc.gaussian_quotient(), rel=1e-12)
    assert sc.trial_quotient(1e4) == pytest.approx(lim, rel=1e-3)


def test_trial_family_lower_bound_interval():
    b = sc.trial_family_lower_bound()
    assert b.lower >= 1 / (24 * PI**2) - 1e-6
    assert b.lower <= b.upper == pytest.approx(CHAIN_B2)
    pure = sc.trial_family_lower_bound(include_gaussian=False)
    assert pure.lower < sc.gaussian_quotient()
    iv = sc.b2_interval()
    assert iv.lower == pytest.approx(4.2217e-3, abs=1e-7)
    assert iv.upper == pytest.approx(4.4476e-3, abs=1e-7)


def test_constant_bound_validation():
    with pytest.raises(ValueError):
        sc.ConstantBound(2, lower=2.0, upper=1.0)
    with pytest.raises(ValueError):
        sc.ConstantBound(2, upper=-1.0)
    with pytest.raises(ValueError):
        sc.ConstantBound(2, upper=1.0, method="guess")


def test_lem3_examples():
    assert sc.lem3_infimum(1, 1, 1, 1) == pytest.approx((1.0, 2.0))
    assert sc.lem3_infimum(1, 1, 4, 1) == pytest.approx((0.5, 4.0))
    with pytest.raises(ValueError):
        sc.lem3_infimum(1, 0, 1, 1)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0.1, 5), b=st.floats(0.1, 5), M=st.floats(0.01, 100), N=st.floats(0.01, 100),
       seed=st.integers(0, 2**16))
def test_lem3_is_infimum(a, b, M, N, seed):
    s_star, value = sc.lem3_infimum(a, b, M, N)
    h = lambda s: s**a * M + s ** (-b) * N
    assert h(s_star) == pytest.approx(value, rel=1e-10)
    s = np.exp(np.random.default_rng(seed).uniform(-5, 5, 1000))
    assert np.all(h(s) >= value * (1 - 1e-12))


def test_critical_constants():
    assert sc.critical_constants(4, 2) == pytest.approx(32 * PI**2, rel=1e-14)
    assert sc.critical_constants(2, 1) == pytest.approx(4 * PI, rel=1e-14)
    for n in (3, 5, 6):
        omega = 2 * PI ** (n / 2) / math.gamma(n / 2)
        assert sc.critical_constants(n, 1) == pytest.approx(n * omega ** (1 / (n - 1)), rel=1e-14)
    for bad in [(4, 4), (2, 3), (4, 0), (4.5, 2)]:
        with pytest.raises(ValueError):
            sc.critical_constants(*bad)


def test_constants_table_rows():
    rows = sc.constants_table(4)
    assert rows[0].method == "interval" and rows[0].k_or_j == 2
    assert {r.method for r in rows} == {"interval", "chain", "formula"}
    assert all(set(r.as_row()) == {"index", "lower", "upper", "method"} for r in rows)
