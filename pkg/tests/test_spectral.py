import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decayfact import (
    SymbolSeries,
    factor_vs_section_cholesky,
    paley_wiener_check,
    spectral_factor,
)

# sigma(theta) = 2 + cos(theta) splits into (p + q z)(p + q / z) with
# p^2 + q^2 = 2 and 2 p q = 1, i.e. p = (1 + sqrt 3) / 2, q = (sqrt 3 - 1) / 2
COS_SYMBOL = SymbolSeries({-1: 0.5, 0: 2.0, 1: 0.5})
P_COEFF = (1.0 + np.sqrt(3.0)) / 2.0
Q_COEFF = (np.sqrt(3.0) - 1.0) / 2.0
# mean of log(2 + cos theta) = log(p^2) = log((2 + sqrt 3) / 2)
COS_LOG_INTEGRAL = np.log((2.0 + np.sqrt(3.0)) / 2.0)


def test_cosine_symbol_split_coefficients():
    fac = spectral_factor(COS_SYMBOL, grid_size=4096)
    assert abs(fac.sigma_l.coefficient(0) - P_COEFF) <= 1e-10
    assert abs(fac.sigma_l.coefficient(1) - Q_COEFF) <= 1e-10
    assert abs(fac.sigma_u.coefficient(0) - P_COEFF) <= 1e-10
    assert abs(fac.sigma_u.coefficient(-1) - Q_COEFF) <= 1e-10
    assert fac.reconstruction_error <= 1e-10
    assert abs(fac.log_integral - COS_LOG_INTEGRAL) <= 1e-12


def test_cosine_split_support_is_exactly_degree_one():
    # the true factor is a degree-1 polynomial; everything else is roundoff
    # and must fall below the trimming floor
    fac = spectral_factor(COS_SYMBOL, grid_size=4096)
    assert fac.sigma_l.support == [0, 1]
    assert fac.sigma_u.support == [-1, 0]


def test_constant_symbol_is_its_own_factorization():
    fac = spectral_factor(SymbolSeries({0: 1.0}), grid_size=64)
    assert fac.sigma_l.support == [0]
    assert abs(fac.sigma_l.coefficient(0) - 1.0) <= 1e-14
    assert fac.reconstruction_error <= 1e-14
    assert abs(fac.log_integral) <= 1e-14


def test_leading_coefficient_is_real_positive():
    sym = SymbolSeries({-1: 0.5 + 0.25j, 0: 3.0, 1: 0.5 - 0.25j})
    fac = spectral_factor(sym, grid_size=2048)
    c0 = fac.sigma_l.coefficient(0)
    assert c0.real > 0.0
    assert abs(c0.imag) <= 1e-12 * c0.real
    assert fac.reconstruction_error <= 1e-10


def test_paley_wiener_accepts_positive_symbol():
    rep = paley_wiener_check(COS_SYMBOL, grid_size=4096)
    assert rep.passed
    assert rep.min_sample == pytest.approx(1.0, abs=1e-9)
    assert rep.max_sample == pytest.approx(3.0, abs=1e-9)
    assert abs(rep.log_integral - COS_LOG_INTEGRAL) <= 1e-12


def test_paley_wiener_rejects_symbol_with_zero():
    # 1 + cos(theta) vanishes at theta = pi, which the even grid hits exactly
    sym = SymbolSeries({-1: 0.5, 0: 1.0, 1: 0.5})
    rep = paley_wiener_check(sym, grid_size=4096)
    assert not rep.passed
    assert rep.min_sample <= rep.floor
    assert rep.log_integral == -np.inf
    with pytest.raises(ValueError):
        spectral_factor(sym, grid_size=4096)


def test_paley_wiener_rejects_non_real_symbol():
    rep = paley_wiener_check(SymbolSeries({0: 2.0, 1: 1.0}), grid_size=256)
    assert not rep.passed
    assert rep.max_imag > 0.0


def test_grid_validation():
    with pytest.raises(ValueError):
        paley_wiener_check(COS_SYMBOL, grid_size=7)
    with pytest.raises(ValueError):
        paley_wiener_check(COS_SYMBOL, grid_size=2)
    wide = SymbolSeries({-40: 0.01, 0: 1.0, 40: 0.01})
    with pytest.raises(ValueError):
        paley_wiener_check(wide, grid_size=64)


def test_split_matches_interior_cholesky_rows():
    cmp = factor_vs_section_cholesky(COS_SYMBOL, n=64, grid_size=4096)
    assert cmp.max_discrepancy <= 1e-6
    assert cmp.interior_rows == 2 * (64 // 2) + 1
    assert cmp.n == 64 and cmp.grid_size == 4096


@settings(max_examples=25, deadline=None)
@given(
    re1=st.floats(-1.0, 1.0), im1=st.floats(-1.0, 1.0),
    re2=st.floats(-1.0, 1.0), im2=st.floats(-1.0, 1.0),
)
def test_split_reconstructs_random_positive_symbols(re1, im1, re2, im2):
    c1 = complex(re1, im1)
    c2 = complex(re2, im2)
    c0 = 1.0 + 2.0 * (abs(c1) + abs(c2))  # keeps the symbol >= 1 everywhere
    sym = SymbolSeries({
        -2: np.conj(c2), -1: np.conj(c1), 0: c0, 1: c1, 2: c2,
    })
    fac = spectral_factor(sym, grid_size=1024)
    assert fac.reconstruction_error <= 1e-9 * c0
    for m in fac.sigma_l.support:
        mirror = fac.sigma_u.coefficient(-m)
        assert abs(mirror - np.conj(fac.sigma_l.coefficient(m))) <= 1e-9
