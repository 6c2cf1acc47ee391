import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decayfact import (
    BlockPartition,
    SectionMatrix,
    StabilizationError,
    SymbolSeries,
    block_partition,
    diag_scale,
    generate_banded,
    generate_expdecay,
    generate_jaffard,
    identity,
    laurent_from_symbol,
    load_matrix,
    load_symbol,
    make_spd,
    opnorm_estimate,
    proj_lower,
    proj_strict_upper,
    save_matrix,
    save_symbol,
    stabilized_section,
)


def random_section(n, seed):
    rng = np.random.default_rng(seed)
    m = 2 * n + 1
    return SectionMatrix(n, rng.standard_normal((m, m))
                         + 1j * rng.standard_normal((m, m)))


def test_section_shape_and_indexing():
    data = np.arange(9, dtype=float).reshape(3, 3)
    a = SectionMatrix(1, data)
    assert a.size == 3
    assert a.at(-1, -1) == 0.0  # storage (0, 0)
    assert a.at(0, 0) == 4.0    # storage (1, 1)
    assert a.at(1, -1) == 6.0   # storage (2, 0)
    with pytest.raises(IndexError):
        a.at(2, 0)
    with pytest.raises(ValueError):
        SectionMatrix(1, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        SectionMatrix(-1, np.zeros((1, 1)))


def test_section_immutable():
    a = identity(2)
    assert not a.data.flags.writeable
    with pytest.raises(ValueError):
        a.data[0, 0] = 5.0


def test_section_arithmetic_matches_numpy():
    a, b = random_section(2, 0), random_section(2, 1)
    np.testing.assert_array_equal((a + b).data, a.data + b.data)
    np.testing.assert_array_equal((a - b).data, a.data - b.data)
    np.testing.assert_array_equal((a @ b).data, a.data @ b.data)
    np.testing.assert_array_equal(a.adjoint().data, a.data.conj().T)
    assert a.max_abs() == np.abs(a.data).max()
    with pytest.raises(ValueError):
        a + random_section(3, 0)
    with pytest.raises(TypeError):
        a + np.eye(5)


def test_generator_envelopes():
    n, s, c = 8, 2.0, 0.7
    a = generate_jaffard(n, s, c, seed=3)
    offs = np.abs(np.subtract.outer(np.arange(-n, n + 1), np.arange(-n, n + 1)))
    env = c * (1.0 + offs) ** (-s)
    mags = np.abs(a.data)
    assert np.all(mags <= env + 1e-15)
    assert np.all(mags >= 0.5 * env - 1e-15)

    g = generate_expdecay(n, 0.5, c, seed=3)
    enve = c * 0.5**offs
    assert np.all(np.abs(g.data) <= enve + 1e-15)

    b = generate_banded(n, 2, seed=3)
    assert np.all(np.abs(b.data)[offs > 2] == 0.0)
    assert np.all(np.abs(b.data)[offs <= 2] >= 0.5 - 1e-15)


def test_generators_reproducible():
    a1 = generate_jaffard(6, 2.0, seed=9)
    a2 = generate_jaffard(6, 2.0, seed=9)
    np.testing.assert_array_equal(a1.data, a2.data)
    assert np.any(generate_jaffard(6, 2.0, seed=10).data != a1.data)


def test_generator_parameter_validation():
    with pytest.raises(ValueError):
        generate_jaffard(4, s=-1.0)
    with pytest.raises(ValueError):
        generate_expdecay(4, gamma=1.0)
    with pytest.raises(ValueError):
        generate_banded(4, bandwidth=-1)


def test_laurent_constant_diagonals():
    sym = SymbolSeries({0: 2.0, 1: 0.5, -1: 0.25})
    a = laurent_from_symbol(sym, 3)
    assert a.at(0, 0) == 2.0
    assert a.at(1, 0) == 0.5   # entry (j, k) carries coefficient j - k
    assert a.at(0, 1) == 0.25
    assert a.at(3, 0) == 0.0
    # every diagonal is constant
    for m in range(-6, 7):
        d = np.diagonal(a.data, offset=-m)
        assert np.all(d == d[0])
    with pytest.raises(ValueError):
        laurent_from_symbol(SymbolSeries({7: 1.0}), 3)


def test_symbol_series_api():
    sym = SymbolSeries({2: 1.0 + 1j, -1: 0.5})
    assert sym.support == [-1, 2]
    assert sym.max_offset() == 2
    assert sym.coefficient(2) == 1.0 + 1j
    assert sym.coefficient(5) == 0.0


def test_make_spd_is_hermitian_positive():
    a = random_section(5, 4)
    spd = make_spd(a, delta=0.3)
    np.testing.assert_allclose(spd.data, spd.data.conj().T, atol=1e-14)
    evals = np.linalg.eigvalsh(spd.data)
    assert evals.min() >= 0.3 - 1e-12


def test_projections_split_exactly():
    a = random_section(4, 11)
    low, up = proj_lower(a), proj_strict_upper(a)
    np.testing.assert_array_equal(low.data + up.data, a.data)
    np.testing.assert_array_equal(proj_lower(low).data, low.data)
    np.testing.assert_array_equal(proj_strict_upper(up).data, up.data)
    assert np.all(np.triu(low.data, 1) == 0.0)
    assert np.all(np.tril(up.data) == 0.0)


def test_diag_scale_entrywise_law():
    a = random_section(2, 5)
    z = 0.5 + 0.25j
    scaled = diag_scale(a, z)
    for j in range(-2, 3):
        for k in range(-2, 3):
            assert scaled.at(j, k) == pytest.approx(z ** (j - k) * a.at(j, k))
    with pytest.raises(ValueError):
        diag_scale(a, 0.0)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000),
       zr=st.floats(0.8, 1.25), zi=st.floats(-0.5, 0.5),
       wr=st.floats(0.8, 1.25), wi=st.floats(-0.5, 0.5))
def test_diag_scale_group_property(seed, zr, zi, wr, wi):
    a = random_section(3, seed)
    z, w = complex(zr, zi), complex(wr, wi)
    twice = diag_scale(diag_scale(a, z), w)
    once = diag_scale(a, z * w)
    np.testing.assert_allclose(twice.data, once.data, rtol=1e-12, atol=1e-12)


def test_block_partition_tiles_parent():
    a = random_section(3, 8)
    p = block_partition(a)
    assert isinstance(p, BlockPartition)
    assert p.a11.shape == (3, 3) and p.a22.shape == (4, 4)
    assert p.a12.shape == (3, 4) and p.a21.shape == (4, 3)
    np.testing.assert_array_equal(
        np.block([[p.a11, p.a12], [p.a21, p.a22]]), a.data)
    assert not p.a11.flags.writeable


def test_opnorm_estimate_diagonal_oracle():
    a = SectionMatrix(1, np.diag([3.0, 1.0, 2.0]))
    assert opnorm_estimate(a) == pytest.approx(3.0, abs=1e-10)
    assert opnorm_estimate(identity(4)) == pytest.approx(1.0, abs=1e-12)
    assert opnorm_estimate(SectionMatrix(1, np.zeros((3, 3)))) == 0.0


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 8))
def test_opnorm_estimate_never_exceeds_svd(seed, n):
    a = random_section(n, seed)
    true = np.linalg.svd(a.data, compute_uv=False)[0]
    est = opnorm_estimate(a)
    assert est <= true * (1.0 + 1e-9)
    assert est >= 0.5 * true  # power iteration from a generic start gets close


def test_stabilized_section_laurent_is_immediate():
    sym = SymbolSeries({0: 2.0, 1: 0.5, -1: 0.5})
    out = stabilized_section(lambda n: laurent_from_symbol(sym, n),
                             probe_halfwidth=4, n_start=8)
    assert out.n == 16  # first doubling already leaves the probe unchanged


def test_stabilized_section_error_paths():
    # probe window larger than the starting section
    with pytest.raises(ValueError):
        stabilized_section(identity, probe_halfwidth=32, n_start=16)

    # central entry keeps moving by 1/n: never settles below an absurd tol
    def drifting(n):
        d = np.eye(2 * n + 1, dtype=complex) * (1.0 + 1.0 / n)
        return SectionMatrix(n, d)

    with pytest.raises(StabilizationError) as exc:
        stabilized_section(drifting, probe_halfwidth=2, tol=1e-30,
                           n_start=4, n_max=64)
    assert exc.value.n_max == 64


def test_matrix_file_round_trip(tmp_path):
    a = random_section(3, 2)
    path = tmp_path / "m.json"
    save_matrix(a, path)
    b = load_matrix(path)
    assert b.n == a.n
    np.testing.assert_array_equal(b.data, a.data)


def test_matrix_file_omits_imag_for_real(tmp_path):
    a = SectionMatrix(1, np.eye(3))
    path = tmp_path / "m.json"
    save_matrix(a, path)
    payload = json.loads(path.read_text())
    assert set(payload) == {"n", "re"}
    np.testing.assert_array_equal(load_matrix(path).data, a.data)


def test_symbol_file_round_trip(tmp_path):
    sym = SymbolSeries({0: 2.0, 1: 0.5 + 0.1j, -3: -0.25})
    path = tmp_path / "s.json"
    save_symbol(sym, path)
    back = load_symbol(path)
    assert back.coeffs == sym.coeffs
