"""Cross-backend checks: the numba kernels and their numpy fallbacks must
agree to roundoff, and the DECAYFACT_BACKEND switch must behave at import."""

import os
import subprocess
import sys

import numpy as np
import pytest

from decayfact import _kernels

pytestmark = pytest.mark.skipif(
    not _kernels.HAVE_NUMBA, reason="cross-backend tests need numba installed"
)

AGREE_TOL = 1e-13


def general_input(m, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    a += m * np.eye(m)  # diagonally dominant, no pivot trouble
    return np.ascontiguousarray(a, dtype=np.complex128)


def spd_input(m, seed):
    rng = np.random.default_rng(seed)
    b = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    a = b @ b.conj().T + m * np.eye(m)
    return np.ascontiguousarray(a, dtype=np.complex128)


@pytest.mark.parametrize("m", [1, 2, 7, 33])
def test_lu_backends_agree(m):
    a = general_input(m, seed=m)
    lu_j, st_j = _kernels.lu_numba(a, 0.0)
    lu_n, st_n = _kernels.lu_numpy(a, 0.0)
    assert st_j == st_n == -1
    np.testing.assert_allclose(lu_j, lu_n, atol=AGREE_TOL, rtol=AGREE_TOL)


def test_lu_backends_agree_on_failing_step():
    a = general_input(4, seed=0)
    a[2, 2] = 0.0
    a[2, :2] = 0.0  # pivot 2 becomes exactly zero during elimination
    _, st_j = _kernels.lu_numba(a, 1e-300)
    _, st_n = _kernels.lu_numpy(a, 1e-300)
    assert st_j == st_n == 2


@pytest.mark.parametrize("m", [1, 2, 7, 33])
def test_cholesky_backends_agree(m):
    a = spd_input(m, seed=m)
    c_j, st_j = _kernels.cholesky_numba(a)
    c_n, st_n = _kernels.cholesky_numpy(a)
    assert st_j == st_n == -1
    np.testing.assert_allclose(c_j, c_n, atol=AGREE_TOL, rtol=AGREE_TOL)


def test_cholesky_backends_agree_on_indefinite():
    a = spd_input(5, seed=3)
    a[2, 2] = -1.0
    _, st_j = _kernels.cholesky_numba(a)
    _, st_n = _kernels.cholesky_numpy(a)
    assert st_j == st_n == 2


@pytest.mark.parametrize("m", [1, 2, 7, 33])
def test_qr_backends_agree(m):
    a = general_input(m, seed=m)
    q_j, r_j, st_j = _kernels.qr_numba(a)
    q_n, r_n, st_n = _kernels.qr_numpy(a)
    assert st_j == st_n == -1
    np.testing.assert_allclose(q_j, q_n, atol=AGREE_TOL, rtol=AGREE_TOL)
    np.testing.assert_allclose(r_j, r_n, atol=AGREE_TOL, rtol=AGREE_TOL)
    assert np.all(np.tril(r_j, -1) == 0.0)
    assert np.all(np.tril(r_n, -1) == 0.0)


def test_qr_backends_agree_on_zero_column():
    a = general_input(4, seed=1)
    a[:, 1] = 0.0
    _, _, st_j = _kernels.qr_numba(a)
    _, _, st_n = _kernels.qr_numpy(a)
    assert st_j == st_n == 1


@pytest.mark.parametrize("m", [1, 2, 7, 33])
def test_tri_inv_backends_agree(m):
    a = general_input(m, seed=m)
    lower = np.ascontiguousarray(np.tril(a))
    upper = np.ascontiguousarray(np.triu(a))
    for jit_fn, np_fn, t in [
        (_kernels.tri_inv_lower_numba, _kernels.tri_inv_lower_numpy, lower),
        (_kernels.tri_inv_upper_numba, _kernels.tri_inv_upper_numpy, upper),
    ]:
        x_j, st_j = jit_fn(t)
        x_n, st_n = np_fn(t)
        assert st_j == st_n == -1
        np.testing.assert_allclose(x_j, x_n, atol=AGREE_TOL, rtol=AGREE_TOL)
        np.testing.assert_allclose(x_j @ t, np.eye(m), atol=1e-10)


def test_tri_inv_backends_agree_on_zero_diagonal():
    a = general_input(4, seed=2)
    lower = np.ascontiguousarray(np.tril(a))
    lower[3, 3] = 0.0
    _, st_j = _kernels.tri_inv_lower_numba(lower)
    _, st_n = _kernels.tri_inv_lower_numpy(lower)
    assert st_j == st_n == 3


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("DECAYFACT_BACKEND", None)
    else:
        env["DECAYFACT_BACKEND"] = env_value
    return subprocess.run(
        [sys.executable, "-c",
         "from decayfact import active_backend; print(active_backend())"],
        env=env, capture_output=True, text=True,
    )


def test_env_flag_selects_numpy_fallback():
    proc = _backend_in_subprocess("numpy")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "numpy"


def test_default_backend_is_numba_when_available():
    proc = _backend_in_subprocess(None)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "numba"


def test_invalid_env_flag_fails_at_import():
    proc = _backend_in_subprocess("cuda")
    assert proc.returncode != 0
    assert "DECAYFACT_BACKEND" in proc.stderr

def test_active_backend_reports_dispatch_table():
    name = _kernels.active_backend()
    assert name in ("numba", "numpy")
    expected = _kernels.lu_numba if name == "numba" else _kernels.lu_numpy
    assert _kernels.lu_factor is expected
