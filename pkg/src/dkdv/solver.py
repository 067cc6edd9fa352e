"""Integrating-factor RK4 for u_t + u_xxx + eta L u + u u_x = 0."""
from dataclasses import dataclass, field
import io
import math

import numpy as np

from .propagator import PropagatorTable
from .snapshot import atomic_write_bytes
from .spectral import PeriodicGrid, SpectralField, sobolev_norm


class BlowUpError(ArithmeticError):
    def __init__(self, message, last_time, last_field=None):
        super().__init__(f"{message} (last finite time {last_time:.17g})")
        self.last_time = last_time
        self.last_field = last_field


@dataclass(frozen=True, eq=False)
class SolverConfig:
    grid: PeriodicGrid
    sym: object
    dt: float
    t_end: float
    dealias: bool = True
    enforce_mean_zero: bool = True
    snapshot_stride: int = 100
    hs_indices: tuple = (1.0,)
    # dt * N * max|u| / period must stay below this; None disables the check
    resolution_c: float | None = 1.0

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be a positive integer, got {self.snapshot_stride}")
        if self.resolution_c is not None and not self.resolution_c > 0:
            raise ValueError("resolution_c must be positive or None")
        phi = self.sym.evaluate(self.grid)
        if not math.isfinite(self.dt * self.sym.eta * np.max(np.abs(phi))):
            raise ValueError("dt * eta * max|Phi| is not finite")

    @property
    def n_steps(self):
        return max(1, math.ceil(self.t_end / self.dt - 1e-9))

    @property
    def step_size(self):
        """Step actually taken: t_end split into ``n_steps`` equal steps."""
        return self.t_end / self.n_steps


def nonlinear_term(coeffs, grid, dealias=True):
    """Fourier coefficients of -1/2 d_x(u^2) by the pseudospectral product.

    Modes run along the last axis, so a stack of time slices works too.
    """
    n, lam = grid.n_modes, grid.period
    keep = grid.dealias_mask()
    c = np.where(keep, coeffs, 0.0) if dealias else coeffs
    u = (np.fft.ifft(c, axis=-1) * (n / lam)).real
    sq = (lam / n) * np.fft.fft(u * u, axis=-1)
    out = -0.5 * (2j * np.pi * grid.freqs) * sq
    if dealias:
        out = np.where(keep, out, 0.0)
    out[..., grid.nyquist_index] = 0.0
    return out


class _Stepper:
    def __init__(self, cfg):
        self.cfg = cfg
        h = cfg.step_size
        self.h = h
        self.full = PropagatorTable(cfg.grid, cfg.sym, h).multiplier
        self.half = PropagatorTable(cfg.grid, cfg.sym, 0.5 * h).multiplier

    def __call__(self, c):
        g, h, E, E2 = self.cfg.grid, self.h, self.full, self.half
        nl = lambda x: nonlinear_term(x, g, self.cfg.dealias)
        k1 = nl(c)
        k2 = nl(E2 * (c + 0.5 * h * k1))
        k3 = nl(E2 * c + 0.5 * h * k2)
        k4 = nl(E * c + h * E2 * k3)
        new = E * c + (h / 6.0) * (E * k1 + 2.0 * E2 * (k2 + k3) + k4)
        if self.cfg.enforce_mean_zero:
            new[0] = 0.0
        return new


def _check_real(u):
    u.check_hermitian()


def check_initial(u, cfg):
    if u.grid != cfg.grid:
        raise ValueError("initial field lives on a different grid than the config")
    _check_real(u)
    scale = max(np.max(np.abs(u.coeffs)), np.finfo(float).tiny)
    if cfg.enforce_mean_zero and abs(u.coeffs[0]) > 1e-12 * scale:
        raise ValueError("initial data must be mean-zero when enforce_mean_zero is on")
    if cfg.resolution_c is not None:
        umax = float(np.max(np.abs(np.fft.ifft(u.coeffs)))) * cfg.grid.n_modes / cfg.grid.period
        courant = cfg.step_size * cfg.grid.n_modes * umax / cfg.grid.period
        if courant > cfg.resolution_c:
            raise ValueError(
                f"dt does not resolve the nonlinearity: dt*N*max|u|/period = {courant:.3g} "
                f"> {cfg.resolution_c}"
            )


def _finite_or_raise(c, t_prev, prev):
    if not np.all(np.isfinite(c)) or np.max(np.abs(c)) > 1e150:
        raise BlowUpError("non-finite or overflowing coefficients", t_prev, prev)


def step(u, cfg):
    """One IFRK4 step of size ``cfg.step_size``."""
    _check_real(u)
    new = _Stepper(cfg)(u.coeffs)
    _finite_or_raise(new, 0.0, u)
    return u.with_coeffs(new)


@dataclass
class Trajectory:
    times: np.ndarray
    mean: np.ndarray
    l2: np.ndarray
    hs: dict
    balance_residual: np.ndarray
    snapshots: list = field(default_factory=list)
    step_size: float = 0.0

    @property
    def final(self):
        return self.snapshots[-1][1]

    def integrated_residual(self):
        return float(np.sum(self.balance_residual[1:]) * self.step_size)

    def to_csv(self, path=None):
        cols = ["t", "mean_re", "mean_im", "l2"] + [f"hs(s={s:g})" for s in self.hs] + ["balance_residual"]
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        hs_cols = list(self.hs.values())
        for i, t in enumerate(self.times):
            row = [t, self.mean[i].real, self.mean[i].imag, self.l2[i]]
            row += [h[i] for h in hs_cols] + [self.balance_residual[i]]
            buf.write(",".join(f"{float(v):.17g}" for v in row) + "\n")
        text = buf.getvalue()
        if path is not None:
            atomic_write_bytes(path, text.encode())
        return text


def simulate(u0, cfg):
    """Run IFRK4 from ``u0`` to ``cfg.t_end``; returns a :class:`Trajectory`.

    The balance residual at step n+1 is
    (|u_{n+1}|^2 - |u_n|^2)/h - eta/lam sum Phi (|u^_n|^2 + |u^_{n+1}|^2),
    the trapezoid form of d/dt |u|^2 - 2 eta/lam sum Phi |u^|^2 (zero at t = 0).
    """
    check_initial(u0, cfg)
    grid, n = cfg.grid, cfg.n_steps
    stepper = _Stepper(cfg)
    h = stepper.h
    weight = cfg.sym.eta * cfg.sym.evaluate(grid) / grid.period

    times = h * np.arange(n + 1)
    times[-1] = cfg.t_end
    mean = np.empty(n + 1, dtype=complex)
    l2sq = np.empty(n + 1)
    hs = {float(s): np.empty(n + 1) for s in cfg.hs_indices}
    resid = np.zeros(n + 1)
    snaps = [(0.0, u0)]

    c = np.array(u0.coeffs)
    power = np.abs(c) ** 2

    def record(i, c, power):
        mean[i] = c[0]
        l2sq[i] = np.sum(power) / grid.period
        f = SpectralField(grid, c)
        for s in hs:
            hs[s][i] = sobolev_norm(f, s)

    record(0, c, power)
    for i in range(1, n + 1):
        new = stepper(c)
        _finite_or_raise(new, times[i - 1], SpectralField(grid, c))
        new_power = np.abs(new) ** 2
        record(i, new, new_power)
        resid[i] = (l2sq[i] - l2sq[i - 1]) / h - np.sum(weight * (power + new_power))
        c, power = new, new_power
        if i % cfg.snapshot_stride == 0 or i == n:
            snaps.append((float(times[i]), SpectralField(grid, c)))
    return Trajectory(times, mean, np.sqrt(l2sq), hs, resid, snaps, h)
