import numpy as np
import pytest

from decayfact import (
    NonConvergenceError,
    NotContractionError,
    NotPositiveDefiniteError,
    SectionMatrix,
    align_with_unit_diagonal,
    generate_jaffard,
    identity,
    lu_unpivoted,
    make_spd,
    opnorm_estimate,
    precondition_by_scaling,
    relative_residual,
    series_cholesky,
    series_lu_inverse,
    spd_rescale,
)


def near_identity(n, rho, seed=0, s=2.0):
    """I + perturbation with operator-norm estimate close to rho < 1."""
    raw = generate_jaffard(n, s=s, c=1.0, seed=seed)
    m = raw.data - np.eye(raw.size)
    scale = rho / opnorm_estimate(SectionMatrix(n, m))
    return SectionMatrix(n, np.eye(raw.size) + scale * m)


def test_two_term_convergence_on_nilpotent_perturbation():
    # single strictly-lower entry: (a - I)^2 = 0, so the series is exact
    # after the first term and stops on the second
    c = 0.7
    data = np.eye(3, dtype=np.complex128)
    data[1, 0] = c
    a = SectionMatrix(1, data)
    sr = series_lu_inverse(a)
    assert sr.terms_used == 2
    assert sr.last_term_norm == 0.0
    expected_l_inv = np.eye(3, dtype=np.complex128)
    expected_l_inv[1, 0] = -c
    np.testing.assert_array_equal(sr.l_inv.data, expected_l_inv)
    np.testing.assert_array_equal(sr.u_inv.data, np.eye(3))


def test_series_matches_direct_lu():
    a = near_identity(16, rho=0.18, seed=5)
    sr = series_lu_inverse(a)
    lmat, umat = align_with_unit_diagonal(sr)
    direct = lu_unpivoted(a)
    np.testing.assert_allclose(lmat.data, direct.f1.data, atol=1e-12)
    np.testing.assert_allclose(umat.data, direct.f2.data, atol=1e-12)


def test_series_inverse_factors_reproduce_identity():
    a = near_identity(12, rho=0.5, seed=9)
    sr = series_lu_inverse(a)
    prod = sr.l_inv.data @ a.data @ sr.u_inv.data
    np.testing.assert_allclose(prod, np.eye(a.size), atol=1e-11)
    assert sr.contraction_norm == pytest.approx(0.5, abs=1e-6)


def test_partial_sums_are_exactly_triangular():
    a = near_identity(8, rho=0.9, seed=2)
    for tol in (1e-1, 1e-4, 1e-10):  # three truncation depths
        sr = series_lu_inverse(a, tol=tol, max_terms=500)
        assert np.all(np.triu(sr.l_inv.data, 1) == 0.0)
        assert np.all(np.tril(sr.u_inv.data, -1) == 0.0)
        np.testing.assert_array_equal(np.diagonal(sr.u_inv.data), np.ones(a.size))


def test_diagonal_input_puts_diagonal_in_lower_factor():
    d = np.diag([1.3, 0.8, 1.1])
    a = SectionMatrix(1, d.astype(np.complex128))
    sr = series_lu_inverse(a)
    np.testing.assert_allclose(sr.l_inv.data @ d, np.eye(3), atol=1e-12)
    np.testing.assert_array_equal(sr.u_inv.data, np.eye(3))


def test_contraction_gate_rejects_far_input():
    a = near_identity(8, rho=1.05, seed=1)
    with pytest.raises(NotContractionError) as exc:
        series_lu_inverse(a)
    assert exc.value.norm_estimate >= 1.0


def test_nonconvergence_reports_last_term():
    a = near_identity(8, rho=0.95, seed=4)
    with pytest.raises(NonConvergenceError) as exc:
        series_lu_inverse(a, tol=1e-14, max_terms=3)
    assert exc.value.iterations == 3
    assert exc.value.last_delta > 1e-14


def test_spd_rescale_known_spectrum():
    # diagonal section: lmin = 1, lmax = 4, alpha = 2 / 5
    a = SectionMatrix(1, np.diag([1.0, 2.5, 4.0]).astype(np.complex128))
    alpha, scaled = spd_rescale(a)
    assert alpha == pytest.approx(0.4, abs=1e-9)
    np.testing.assert_allclose(scaled.data, 0.4 * a.data, atol=1e-12)
    gate = opnorm_estimate(identity(1) - scaled)
    assert gate < 1.0


def test_spd_rescale_rejects_indefinite():
    a = SectionMatrix(1, np.diag([1.0, -2.0, 4.0]).astype(np.complex128))
    with pytest.raises(NotPositiveDefiniteError):
        spd_rescale(a)


def test_series_cholesky_matches_direct():
    from decayfact import cholesky

    base = generate_jaffard(16, s=2.0, seed=7)
    a = make_spd(base, delta=1.0)
    via_series = series_cholesky(a)
    direct = cholesky(a)
    np.testing.assert_allclose(via_series.f1.data, direct.f1.data, atol=1e-9)
    assert via_series.residual <= 1e-10
    assert relative_residual(a, via_series.f1, via_series.f2) <= 1e-10


def test_series_cholesky_factor_shape():
    base = generate_jaffard(8, s=2.0, seed=3)
    a = make_spd(base, delta=0.5)
    res = series_cholesky(a)
    assert np.all(np.triu(res.f1.data, 1) == 0.0)
    d = np.diagonal(res.f1.data)
    assert np.all(d.real > 0.0) and np.all(d.imag == 0.0)
    np.testing.assert_array_equal(res.f2.data, res.f1.data.conj().T)


def test_preconditioning_shrinks_the_gate():
    # too far from I for the raw series, close enough after conjugation by
    # damped reference factors
    a = near_identity(12, rho=1.4, seed=11)
    with pytest.raises(NotContractionError):
        series_lu_inverse(a)
    ref = lu_unpivoted(a)
    before = opnorm_estimate(a - identity(12))
    cond = precondition_by_scaling(a, ref.f1, ref.f2, eps=0.9)
    after = opnorm_estimate(cond - identity(12))
    assert after < before
    sr = series_lu_inverse(cond)
    prod = sr.l_inv.data @ cond.data @ sr.u_inv.data
    np.testing.assert_allclose(prod, np.eye(cond.size), atol=1e-10)


def test_preconditioning_validates_eps():
    a = near_identity(4, rho=0.3, seed=0)
    ref = lu_unpivoted(a)
    with pytest.raises(ValueError):
        precondition_by_scaling(a, ref.f1, ref.f2, eps=0.0)
    with pytest.raises(ValueError):
        precondition_by_scaling(a, ref.f1, ref.f2, eps=-0.5)
