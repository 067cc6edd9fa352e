"""Fourier conventions on the periodic interval [0, period).

Forward transform  f^(k) = int_0^lam e^{-2 pi i k x} f(x) dx, discretized as
(lam/N) * DFT; inverse  f(x) = (1/lam) sum_k e^{2 pi i k x} f^(k).  Frequencies
are k = m / lam with integer mode index m stored in FFT order
0, 1, ..., N/2, -N/2+1, ..., -1 (the Nyquist mode carries +N/2).
"""
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np


class HermitianSymmetryError(ValueError):
    """A field flagged real-valued violates f^(-k) = conj f^(k)."""


@dataclass(frozen=True)
class PeriodicGrid:
    period: float
    n_modes: int

    def __post_init__(self):
        if not np.isfinite(self.period) or self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if int(self.n_modes) != self.n_modes or self.n_modes < 4 or self.n_modes % 2:
            raise ValueError(f"n_modes must be an even integer >= 4, got {self.n_modes}")
        object.__setattr__(self, "period", float(self.period))
        object.__setattr__(self, "n_modes", int(self.n_modes))

    @cached_property
    def modes(self):
        """Integer mode indices m (so that k = m / period), FFT order."""
        n = self.n_modes
        m = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
        m[n // 2] = n // 2
        m.setflags(write=False)
        return m

    @cached_property
    def freqs(self):
        k = self.modes / self.period
        k.setflags(write=False)
        return k

    @cached_property
    def points(self):
        x = np.arange(self.n_modes) * (self.period / self.n_modes)
        x.setflags(write=False)
        return x

    @property
    def spacing(self):
        return self.period / self.n_modes

    @property
    def nyquist_index(self):
        return self.n_modes // 2

    @cached_property
    def partner_index(self):
        """Index of -k for each k; the Nyquist mode maps to itself."""
        n = self.n_modes
        idx = (-np.arange(n)) % n
        idx.setflags(write=False)
        return idx

    def dealias_mask(self):
        """True on modes kept by the 2/3 rule (|m| <= N/3)."""
        return np.abs(self.modes) <= self.n_modes / 3.0

    def bracket(self):
        """Japanese bracket <k> = (1 + k^2)^(1/2)."""
        return np.sqrt(1.0 + self.freqs ** 2)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients f^(k) of a field on ``grid`` (FFT order)."""

    grid: PeriodicGrid
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.grid.n_modes,):
            raise ValueError(f"expected {self.grid.n_modes} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def with_coeffs(self, coeffs):
        return replace(self, coeffs=coeffs)

    def hermitian_defect(self):
        c = self.coeffs
        scale = max(np.max(np.abs(c)), np.finfo(float).tiny)
        defect = np.max(np.abs(c - np.conj(c[self.grid.partner_index])))
        return defect / scale

    def check_hermitian(self, rtol=1e-10):
        if self.real and self.hermitian_defect() > rtol:
            raise HermitianSymmetryError(
                f"coefficients flagged real are not Hermitian (defect {self.hermitian_defect():.3e})"
            )

    def __add__(self, other):
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs, self.real and other.real)

    def __sub__(self, other):
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs, self.real and other.real)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return SpectralField(self.grid, self.coeffs * scalar, self.real and scalar.imag == 0)

    __rmul__ = __mul__


def _same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def forward_transform(samples, grid):
    """Trapezoid/DFT approximation of f^(k) from samples at ``grid.points``."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n_modes,):
        raise ValueError(f"expected {grid.n_modes} samples, got shape {samples.shape}")
    real = not np.iscomplexobj(samples)
    return SpectralField(grid, (grid.period / grid.n_modes) * np.fft.fft(samples), real=real)


def inverse_transform(field):
    """Samples at ``grid.points``; real-valued when the field is flagged real."""
    field.check_hermitian()
    grid = field.grid
    values = np.fft.ifft(field.coeffs) * (grid.n_modes / grid.period)
    return values.real if field.real else values


def sobolev_norm(field, s):
    """((1/lam) sum_k <k>^{2s} |f^(k)|^2)^{1/2}."""
    grid = field.grid
    weight = grid.bracket() ** (2.0 * s)
    return float(np.sqrt(np.sum(weight * np.abs(field.coeffs) ** 2) / grid.period))


def l2_norm(field):
    return sobolev_norm(field, 0.0)


def derivative_multiplier(grid, order):
    """(2 pi i k)^order with the Nyquist entry zeroed for odd orders."""
    mult = (2j * np.pi * grid.freqs) ** order
    if order % 2:
        mult[grid.nyquist_index] = 0.0
    return mult


def spectral_derivative(field, order):
    if int(order) != order or order < 1:
        raise ValueError("order must be a positive integer")
    return field.with_coeffs(field.coeffs * derivative_multiplier(field.grid, int(order)))


def project_mean_zero(field):
    c = field.coeffs.copy()
    c[0] = 0.0
    return field.with_coeffs(c)


def from_modes(grid, modes, real=True):
    """Field from ``{m: amplitude}``; real fields get the conjugate partners filled in."""
    c = np.zeros(grid.n_modes, dtype=complex)
    n = grid.n_modes
    for m, amp in dict(modes).items():
        m = int(m)
        if abs(m) > n // 2 or m == -n // 2:
            raise ValueError(f"mode {m} not representable on a grid with N={n}")
        c[m % n] += amp
        if real and m != 0 and m != n // 2:
            c[(-m) % n] += np.conj(amp)
    if real:
        c[0] = c[0].real
        c[n // 2] = c[n // 2].real
    return SpectralField(grid, c, real=real)


def random_field(grid, rng, decay=2.0, amplitude=1.0, mean_zero=True, band=None):
    """Hermitian field with complex Gaussian coefficients decaying like <k>^-decay."""
    n = grid.n_modes
    band = n // 3 if band is None else band
    if not 0 < band < n // 2:
        raise ValueError(f"band must lie in (0, {n // 2}), got {band}")
    c = np.zeros(n, dtype=complex)
    positive = np.arange(1, band + 1)
    draw = rng.standard_normal(band) + 1j * rng.standard_normal(band)
    env = amplitude * (1.0 + (positive / grid.period) ** 2) ** (-decay / 2.0)
    c[positive] = draw * env
    c[(-positive) % n] = np.conj(c[positive])
    if not mean_zero:
        c[0] = amplitude * rng.standard_normal()
    return SpectralField(grid, c)
