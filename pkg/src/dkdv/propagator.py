"""Exact linear group V(t) and Duhamel integrals against it.

V(t) acts on mode k by exp(2 pi i (4 pi^2 k^3) t + eta Phi(k) |t|).  The
dispersive phase is reduced modulo one full cycle in extended precision
before exponentiation.  The Nyquist mode carries no dispersion (u_xxx is an
odd derivative and the Nyquist entry of odd derivatives is zero).
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .kernels import cycles_scale, reduced_cycles, two_sided_quadrature

_TWO_PI = 2.0 * np.pi


def dispersion_frequency(grid):
    """Angular frequency omega_k = 2 pi (4 pi^2 k^3), Nyquist entry zeroed."""
    omega = _TWO_PI * 4.0 * np.pi ** 2 * grid.freqs ** 3
    omega[grid.nyquist_index] = 0.0
    return omega


def dispersion_cycles(grid, t):
    """Fractional cycles of exp(2 pi i 4 pi^2 k^3 t) per mode, in [0, 1).

    For an array of times the result has one row per time.
    """
    cyc = reduced_cycles(grid.modes, cycles_scale(grid.period, t))
    cyc[..., grid.nyquist_index] = 0.0
    return cyc


@lru_cache(maxsize=8)
def _phase_table(grid, key, n_time):
    times = np.frombuffer(key, dtype=float, count=n_time)
    table = np.exp(_TWO_PI * 1j * dispersion_cycles(grid, times))
    table.setflags(write=False)
    return table


def dispersion_phase(grid, times):
    """Read-only table exp(2 pi i 4 pi^2 k^3 t_j), one row per time; recent tables are cached."""
    times = np.ascontiguousarray(times, dtype=float)
    return _phase_table(grid, times.tobytes(), times.size)


@dataclass(frozen=True, eq=False)
class PropagatorTable:
    """V(dt) as a diagonal table: phase angle and real dissipation factor per mode."""

    grid: object
    sym: object
    dt: float

    @cached_property
    def phase_angle(self):
        ang = _TWO_PI * dispersion_cycles(self.grid, self.dt)
        ang.setflags(write=False)
        return ang

    @cached_property
    def dissipation_factor(self):
        fac = np.exp(self.sym.eta * self.sym.evaluate(self.grid) * abs(self.dt))
        fac.setflags(write=False)
        return fac

    @property
    def kdv_phase(self):
        return np.exp(1j * self.phase_angle)

    @cached_property
    def multiplier(self):
        m = self.dissipation_factor * self.kdv_phase
        m.setflags(write=False)
        return m

    def apply(self, coeffs):
        return self.multiplier * coeffs


def evolve_linear(u0, sym, t):
    """V(t) u0 for any real t (the dissipation exponent uses |t|)."""
    if t == 0:
        return u0.with_coeffs(u0.coeffs.copy())
    return u0.with_coeffs(PropagatorTable(u0.grid, sym, float(t)).apply(u0.coeffs))


def group_multiplier(grid, sym, times):
    """V(t_j) multipliers for many times, shape (len(times), N)."""
    times = np.asarray(times, dtype=float)
    phi = sym.evaluate(grid)
    phase = _TWO_PI * 1j * dispersion_cycles(grid, times)
    return np.exp(phase + sym.eta * phi[None, :] * np.abs(times)[:, None])


def kernel_exponents(grid, sym):
    """Forward and backward per-mode exponents of the Duhamel kernel."""
    omega = dispersion_frequency(grid)
    damp = sym.eta * sym.evaluate(grid)
    return 1j * omega + damp, -1j * omega + damp


def duhamel_all(F, sym):
    """int_0^t V(t - t') F(t') dt' at every node t of F's time grid.

    ``F`` must be a SpaceTimeField whose grid contains t = 0.  Returns the
    coefficient table, shape (n_time, N).
    """
    origin = F.origin_index()
    mu_f, mu_b = kernel_exponents(F.grid, sym)
    rows = two_sided_quadrature(F.coeffs.T, mu_f, mu_b, F.dt, origin)
    return rows.T


def duhamel(F, sym, t):
    """Duhamel integral of ``F`` evaluated at one grid time ``t``."""
    from .spectral import SpectralField

    j = F.time_index(t)
    return SpectralField(F.grid, duhamel_all(F, sym)[j], real=F.real)


def i_a_operator(f, a, dt, origin=0):
    """Quadrature of I_a(t) = int_0^t exp(a |t - t'|) f(t') dt' at every node.

    ``f`` is a uniformly sampled series (or a stack of series along the last
    axis) whose node ``origin`` sits at t = 0; ``a`` is a scalar or one value
    per series.
    """
    f = np.asarray(f)
    single = f.ndim == 1
    rows = np.atleast_2d(f).astype(complex)
    a = np.broadcast_to(np.asarray(a, dtype=complex), rows.shape[:1])
    out = two_sided_quadrature(rows, a, a, float(dt), int(origin))
    if not np.iscomplexobj(f) and not np.any(np.imag(a)):
        out = out.real
    return out[0] if single else out
