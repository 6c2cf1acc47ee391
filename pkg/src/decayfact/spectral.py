"""Spectral factorization of positive Toeplitz symbols.

A real positive symbol sigma(theta) = sum_m c_m e^(i m theta) splits as
sigma = sigma_l * sigma_u where sigma_l extends analytically inside the unit
disk (nonnegative offsets only) and sigma_u = conj-mirror of sigma_l.  The
split is computed discretely: sample log sigma on a uniform grid, take the
causal half of its Fourier coefficients (DC halved), exponentiate back.
Interior rows of a direct Cholesky factor of the associated constant-diagonal
section reproduce the sigma_l coefficients, which gives an independent
cross-check of both routes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .factorizations import cholesky
from .matrices import SectionMatrix, SymbolSeries, laurent_from_symbol

#: imaginary parts above this (relative) bound mean the symbol is not real
IMAG_TOL = 1e-10
#: keep split coefficients above this relative floor
COEFF_FLOOR = 1e-15


def _grid_samples(sym, grid_size):
    """Symbol values at theta_t = 2 pi t / grid_size via an inverse FFT."""
    g = int(grid_size)
    if g < 4 or g % 2:
        raise ValueError("grid size must be even and at least 4")
    if sym.max_offset() >= g // 2:
        raise ValueError("grid too coarse for the symbol support")
    coef = np.zeros(g, dtype=np.complex128)
    for m, cm in sym.coeffs.items():
        coef[m % g] += cm
    return g * np.fft.ifft(coef)


@dataclass(frozen=True)
class PaleyWienerReport:
    passed: bool
    min_sample: float
    max_sample: float
    max_imag: float
    log_integral: float
    grid_size: int
    floor: float


def paley_wiener_check(sym, grid_size=4096, floor_rel=1e-8):
    """Verify the sampled symbol is real and stays above a relative floor.

    Also reports the trapezoid estimate of the mean of log sigma (finite for
    factorizable symbols; it equals 2 log sigma_l(0) after splitting).
    """
    samples = _grid_samples(sym, grid_size)
    scale = float(np.max(np.abs(samples)))
    max_imag = float(np.max(np.abs(samples.imag)))
    real_ok = scale == 0.0 or max_imag <= IMAG_TOL * scale
    floor = floor_rel * scale
    min_sample = float(np.min(samples.real))
    positive_ok = min_sample > floor and scale > 0.0
    if real_ok and positive_ok:
        log_integral = float(np.mean(np.log(samples.real)))
    else:
        log_integral = -np.inf
    return PaleyWienerReport(
        passed=bool(real_ok and positive_ok),
        min_sample=min_sample,
        max_sample=float(np.max(samples.real)),
        max_imag=max_imag,
        log_integral=log_integral,
        grid_size=int(grid_size),
        floor=float(floor),
    )


@dataclass(frozen=True)
class SpectralFactorization:
    sigma_l: SymbolSeries
    sigma_u: SymbolSeries
    grid_size: int
    reconstruction_error: float
    log_integral: float


def _series_to_grid(sym, g):
    coef = np.zeros(g, dtype=np.complex128)
    for m, cm in sym.coeffs.items():
        coef[m % g] += cm
    return g * np.fft.ifft(coef)


def _trim(coefs, offsets):
    scale = float(np.max(np.abs(coefs))) if len(coefs) else 0.0
    floor = COEFF_FLOOR * scale
    return SymbolSeries(
        {int(m): complex(c) for m, c in zip(offsets, coefs) if abs(c) > floor}
    )


def spectral_factor(sym, grid_size=4096):
    """Split a real positive symbol into causal and anticausal factors.

    sigma_l has support in [0, grid_size/2) with sigma_l(0) real positive;
    sigma_u mirrors it in (-grid_size/2, 0].  The reported reconstruction
    error is max_grid |sigma_l sigma_u - sigma| evaluated from the retained
    coefficients.
    """
    report = paley_wiener_check(sym, grid_size)
    if not report.passed:
        raise ValueError(
            "symbol is not positive on the grid (min sample %.3e, max imag %.3e)"
            % (report.min_sample, report.max_imag)
        )
    g = int(grid_size)
    samples = _grid_samples(sym, g).real
    logs = np.log(samples)
    cep = np.fft.fft(logs) / g          # Fourier coefficients of log sigma
    causal = np.zeros(g, dtype=np.complex128)
    causal[0] = 0.5 * cep[0]            # DC split evenly between the halves
    causal[1 : g // 2] = cep[1 : g // 2]
    sl_samples = np.exp(g * np.fft.ifft(causal))
    su_samples = samples / sl_samples

    sl_coefs = np.fft.fft(sl_samples) / g
    sigma_l = _trim(sl_coefs[: g // 2], range(g // 2))
    su_coefs = np.fft.fft(su_samples) / g
    anti_offsets = [0] + list(range(-1, -(g // 2), -1))
    anti_values = np.concatenate(([su_coefs[0]], su_coefs[-1 : g // 2 : -1]))
    sigma_u = _trim(anti_values, anti_offsets)

    c0 = sigma_l.coefficient(0)
    if not (c0.real > 0.0 and abs(c0.imag) <= 1e-12 * abs(c0)):
        raise ValueError("leading split coefficient is not real positive")

    recon = _series_to_grid(sigma_l, g) * _series_to_grid(sigma_u, g)
    recon_err = float(np.max(np.abs(recon - samples)))
    return SpectralFactorization(
        sigma_l=sigma_l,
        sigma_u=sigma_u,
        grid_size=g,
        reconstruction_error=recon_err,
        log_integral=report.log_integral,
    )


@dataclass(frozen=True)
class SectionCholeskyComparison:
    n: int
    grid_size: int
    interior_rows: int
    max_discrepancy: float


def factor_vs_section_cholesky(sym, n, grid_size=4096):
    """Compare split coefficients against interior rows of a direct section
    Cholesky factor.

    Rows at distance >= n/2 from the section boundary are compared:
    C[j, j-m] should match coefficient m of sigma_l for every available
    offset m >= 0 (missing coefficients count as zero).
    """
    fac = spectral_factor(sym, grid_size)
    section = laurent_from_symbol(sym, n)
    c = cholesky(section).f1
    half = n // 2
    worst = 0.0
    rows = 0
    for j in range(-half, half + 1):
        rows += 1
        for m in range(0, j + n + 1):
            have = c.at(j, j - m)
            want = fac.sigma_l.coefficient(m)
            worst = max(worst, abs(have - want))
    return SectionCholeskyComparison(
        n=n, grid_size=int(grid_size), interior_rows=rows, max_discrepancy=worst
    )
