"""Synthetic spectrum generation, averaging, and coarse-graining.

Two independent generation routes are provided on purpose. The exact sampler
draws averaged periodogram bins straight from their Gamma law; the time-domain
route synthesizes a stationary Gaussian record and runs it through the same
periodogram used for measured data. Agreement of the two is itself a test
target, so neither may be expressed through the other.

Conventions, fixed across the package:
  - one-sided PSD, S(nu) = 2*delta*|DFT|^2 / M in uV^2/Hz, so the PSD sums
    to the record variance: sum_i S_i * nu_t = var(y)
  - DC and Nyquist bins are excluded everywhere; the raw grid is
    nu_i = i/(M*delta), i = 1 .. M/2 - 1
  - rectangular window, no overlap
  - even record length only
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .model import eval_psd

__all__ = [
    "AcquisitionConfig",
    "Spectrum",
    "AveragedSpectrum",
    "TimeSeries",
    "sample_periodogram_exact",
    "synthesize_timeseries",
    "periodogram",
    "coarse_grain",
    "average_spectra",
]

# relative slack when checking t_total/delta against an integer
_RECORD_LENGTH_TOL = 1e-6


@dataclass(frozen=True)
class AcquisitionConfig:
    """Acquisition geometry: sampling, record length, averaging, fit window.

    delta     sampling interval, s
    t_total   record duration, s
    fit_lo    lower edge of the fit window, Hz
    fit_hi    upper edge of the fit window, Hz
    n_ave     count of independently acquired records to average
    n_bin     coarse-grain width, in raw bins
    """

    delta: float
    t_total: float
    fit_lo: float
    fit_hi: float
    n_ave: int = 1
    n_bin: int = 1

    def __post_init__(self) -> None:
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ConfigError(f"delta must be positive and finite, got {self.delta}")
        if not (self.t_total > 0.0 and math.isfinite(self.t_total)):
            raise ConfigError(f"t_total must be positive and finite, got {self.t_total}")
        ratio = self.t_total / self.delta
        m = round(ratio)
        if m < 4 or abs(ratio - m) > _RECORD_LENGTH_TOL * ratio:
            raise ConfigError(
                f"record length t_total/delta = {ratio!r} must be an integer >= 4"
            )
        if m % 2:
            raise ConfigError(f"record length M = {m} must be even")
        if not (isinstance(self.n_ave, int) and self.n_ave >= 1):
            raise ConfigError(f"n_ave must be an integer >= 1, got {self.n_ave!r}")
        if not (isinstance(self.n_bin, int) and self.n_bin >= 1):
            raise ConfigError(f"n_bin must be an integer >= 1, got {self.n_bin!r}")
        if not (0.0 <= self.fit_lo < self.fit_hi <= self.nyquist):
            raise ConfigError(
                f"fit window [{self.fit_lo}, {self.fit_hi}] Hz must satisfy "
                f"0 <= lo < hi <= Nyquist ({self.nyquist} Hz)"
            )

    @property
    def record_length(self) -> int:
        """Samples per record, M."""
        return round(self.t_total / self.delta)

    @property
    def nu_t(self) -> float:
        """Raw grid spacing 1/t_total, Hz."""
        return 1.0 / self.t_total

    @property
    def nyquist(self) -> float:
        return 0.5 / self.delta

    @property
    def n_eff(self) -> int:
        """Statistical averaging count per coarse bin, n_bin*n_ave."""
        return self.n_bin * self.n_ave

    @property
    def coarse_spacing(self) -> float:
        """Spacing of the coarse-grained grid, n_bin/t_total, Hz."""
        return self.n_bin * self.nu_t

    def raw_grid(self) -> np.ndarray:
        """Raw frequencies i*nu_t, i = 1 .. M/2 - 1 (DC, Nyquist excluded)."""
        return self.nu_t * np.arange(1, self.record_length // 2, dtype=float)

    def coarse_grid(self) -> np.ndarray:
        """Centers of the coarse bins: block means of the raw grid."""
        return _block_mean(self.raw_grid(), self.n_bin)


def _block_mean(x: np.ndarray, width: int) -> np.ndarray:
    # trailing remainder shorter than one block is dropped
    nb = x.size // width
    return x[: nb * width].reshape(nb, width).mean(axis=1)


@dataclass(frozen=True)
class Spectrum:
    """Raw one-sided spectrum on a uniform grid. nu in Hz, s in uV^2/Hz."""

    nu: np.ndarray
    s: np.ndarray

    def __post_init__(self) -> None:
        nu = np.asarray(self.nu, dtype=float)
        s = np.asarray(self.s, dtype=float)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "s", s)
        if nu.ndim != 1 or nu.shape != s.shape:
            raise ValueError("nu and s must be 1-d arrays of equal length")
        if nu.size >= 2:
            d = np.diff(nu)
            if not np.all(d > 0.0):
                raise ValueError("frequency grid must be strictly increasing")
            if not np.allclose(d, d[0], rtol=1e-9, atol=0.0):
                raise ValueError("frequency grid must be uniformly spaced")


@dataclass(frozen=True)
class AveragedSpectrum:
    """Averaged spectrum: each bin is a mean of n_eff raw periodogram values,
    so its variance is s_bar^2/n_eff. nu in Hz, s_bar in uV^2/Hz."""

    nu: np.ndarray
    s_bar: np.ndarray
    n_eff: int

    def __post_init__(self) -> None:
        nu = np.asarray(self.nu, dtype=float)
        s_bar = np.asarray(self.s_bar, dtype=float)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "s_bar", s_bar)
        if nu.ndim != 1 or nu.shape != s_bar.shape:
            raise ValueError("nu and s_bar must be 1-d arrays of equal length")
        if nu.size >= 2 and not np.all(np.diff(nu) > 0.0):
            raise ValueError("frequency grid must be strictly increasing")
        if not (isinstance(self.n_eff, (int, np.integer)) and self.n_eff >= 1):
            raise ValueError(f"n_eff must be an integer >= 1, got {self.n_eff!r}")
        object.__setattr__(self, "n_eff", int(self.n_eff))


@dataclass(frozen=True)
class TimeSeries:
    """Real-valued record y(t0 + m*delta), y in uV."""

    t0: float
    delta: float
    y: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "y", y)
        if self.delta <= 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if y.ndim != 1 or y.size < 2:
            raise ValueError("y must be a 1-d array with at least 2 samples")
        if not np.all(np.isfinite(y)):
            raise ValueError("time series contains non-finite samples")


def sample_periodogram_exact(v, cfg: AcquisitionConfig, seed) -> AveragedSpectrum:
    """Draw an averaged spectrum directly from its sampling distribution.

    Each raw periodogram bin of a Gaussian record is exponential with mean
    f(nu_i, v); the mean of n_eff = n_bin*n_ave independent such values is
    Gamma(shape n_eff, mean f). Bins are independent, so the whole averaged
    spectrum can be drawn in one shot, bypassing the time domain. The bin
    mean is evaluated at the coarse-bin center.
    """
    rng = np.random.default_rng(seed)
    nu = cfg.coarse_grid()
    f = eval_psd(v, nu)
    n_eff = cfg.n_eff
    s_bar = rng.gamma(shape=float(n_eff), scale=f / n_eff)
    return AveragedSpectrum(nu=nu, s_bar=s_bar, n_eff=n_eff)


def synthesize_timeseries(v, cfg: AcquisitionConfig, seed) -> TimeSeries:
    """Generate one stationary Gaussian record whose expected periodogram
    is f(nu_i, v) on the raw grid.

    The record is built in the frequency domain: independent complex
    Gaussian coefficients C_i with E|C_i|^2 = M*f_i/(2*delta) for
    i = 1 .. M/2 - 1, zero DC and Nyquist, inverse real FFT. Deterministic
    given the seed.
    """
    m = cfg.record_length
    if m < 4:
        raise ConfigError(f"record length M = {m} must be at least 4")
    rng = np.random.default_rng(seed)
    f = eval_psd(v, cfg.raw_grid())
    # a, b iid standard normal; |C|^2 then averages to M*f/(2*delta)
    ab = rng.standard_normal((2, m // 2 - 1))
    amp = np.sqrt(m * f / (4.0 * cfg.delta))
    coeff = np.zeros(m // 2 + 1, dtype=complex)
    coeff[1 : m // 2] = amp * (ab[0] + 1j * ab[1])
    y = np.fft.irfft(coeff, n=m)
    return TimeSeries(t0=0.0, delta=cfg.delta, y=y)


def periodogram(ts: TimeSeries) -> Spectrum:
    """One-sided periodogram 2*delta*|rfft(y)|^2/M on the raw grid.

    DC and Nyquist are excluded: the exponential-statistics argument needs a
    complex coefficient, and those two are real.
    """
    m = ts.y.size
    if m < 4:
        raise ValueError(f"need at least 4 samples, got {m}")
    if m % 2:
        raise ValueError(f"record length {m} must be even")
    coeff = np.fft.rfft(ts.y)
    s = (2.0 * ts.delta / m) * np.abs(coeff[1 : m // 2]) ** 2
    nu = np.arange(1, m // 2, dtype=float) / (m * ts.delta)
    return Spectrum(nu=nu, s=s)


def coarse_grain(sp, n_bin: int) -> AveragedSpectrum:
    """Average n_bin adjacent bins; a trailing remainder is dropped.

    Accepts a raw Spectrum (result n_eff = n_bin) or an AveragedSpectrum
    (n_eff multiplies). Centers are the means of the constituent frequencies.
    """
    if not (isinstance(n_bin, (int, np.integer)) and n_bin >= 1):
        raise ValueError(f"n_bin must be an integer >= 1, got {n_bin!r}")
    n_bin = int(n_bin)
    values = sp.s_bar if isinstance(sp, AveragedSpectrum) else sp.s
    base = sp.n_eff if isinstance(sp, AveragedSpectrum) else 1
    if sp.nu.size // n_bin < 1:
        raise ValueError(f"need at least n_bin = {n_bin} bins, got {sp.nu.size}")
    return AveragedSpectrum(
        nu=_block_mean(sp.nu, n_bin),
        s_bar=_block_mean(values, n_bin),
        n_eff=n_bin * base,
    )


def average_spectra(spectra) -> AveragedSpectrum:
    """Pointwise mean of spectra on identical grids with identical n_eff.

    A raw Spectrum counts as n_eff = 1. The result carries
    n_eff = len(spectra) * common n_eff.
    """
    spectra = list(spectra)
    if not spectra:
        raise ValueError("need at least one spectrum")

    def parts(sp):
        if isinstance(sp, AveragedSpectrum):
            return sp.nu, sp.s_bar, sp.n_eff
        return sp.nu, sp.s, 1

    nu0, _, n0 = parts(spectra[0])
    stack = []
    for sp in spectra:
        nu, s, n = parts(sp)
        if not np.array_equal(nu, nu0):
            raise ValueError("spectra are on different frequency grids")
        if n != n0:
            raise ValueError(f"mixed n_eff in average: {n} != {n0}")
        stack.append(s)
    return AveragedSpectrum(nu=nu0, s_bar=np.mean(stack, axis=0), n_eff=n0 * len(stack))
