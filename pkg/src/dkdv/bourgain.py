"""Space-time fields, discretized Bourgain norms and the smooth time cutoff.

Space-time coefficients u^(k, t) live on a uniform time grid.  Norms are
computed in the interaction frame w(k, t) = exp(-2 pi i 4 pi^2 k^3 t) u^(k, t),
whose time transform w^(k, sigma) equals u^(k, sigma + 4 pi^2 k^3); the
modulation weight <tau - 4 pi^2 k^3> then becomes the plain <sigma>, so no
tau resolution of the cubic itself is needed.

Time transforms follow f^(tau) = int e^{-2 pi i tau t} f(t) dt, discretized
with weight dt after zero-padding the window by ``pad``; Riemann sums in tau
use the padded spacing d_tau = 1 / (pad * n_time * dt).
"""
from dataclasses import dataclass
import math

import numpy as np

from .propagator import dispersion_phase
from .spectral import SpectralField, sobolev_norm

FAMILIES = ("Hs", "Ysb", "Ys", "Zs")
DEFAULT_PAD = 2


def window_times(t_w, n_time):
    """Periodic time grid t_j = -t_w + j dt on [-t_w, t_w), t = 0 at index n_time/2."""
    if n_time < 4 or n_time % 2:
        raise ValueError(f"n_time must be an even integer >= 4, got {n_time}")
    if not t_w > 0:
        raise ValueError(f"window half-width must be positive, got {t_w}")
    dt = 2.0 * t_w / n_time
    return -t_w + dt * np.arange(n_time)


class SpaceTimeField:
    """u^(k, t_j) on a uniform time grid, stored as an (n_time, N) table."""

    def __init__(self, grid, times, coeffs, real=True):
        times = np.array(times, dtype=float)
        coeffs = np.array(coeffs, dtype=complex)
        if times.ndim != 1 or times.size < 3:
            raise ValueError("need at least 3 time samples")
        steps = np.diff(times)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.mean():
            raise ValueError("time grid must be uniform and increasing")
        if coeffs.shape != (times.size, grid.n_modes):
            raise ValueError(f"coeffs shape {coeffs.shape} != {(times.size, grid.n_modes)}")
        times.setflags(write=False)
        coeffs.setflags(write=False)
        self.grid = grid
        self.times = times
        self.coeffs = coeffs
        self.real = real
        self.dt = float(steps.mean())

    @classmethod
    def on_window(cls, grid, t_w, n_time, coeffs=None, real=True):
        times = window_times(t_w, n_time)
        if coeffs is None:
            coeffs = np.zeros((n_time, grid.n_modes), dtype=complex)
        return cls(grid, times, coeffs, real)

    @classmethod
    def from_samples(cls, grid, times, samples):
        """Build from physical samples of shape (n_time, N)."""
        samples = np.asarray(samples)
        c = (grid.period / grid.n_modes) * np.fft.fft(samples, axis=1)
        return cls(grid, times, c, real=not np.iscomplexobj(samples))

    @property
    def n_time(self):
        return self.times.size

    @property
    def duration(self):
        """Length n_time * dt of the periodic time window."""
        return self.n_time * self.dt

    def with_coeffs(self, coeffs):
        return SpaceTimeField(self.grid, self.times, coeffs, self.real)

    def time_index(self, t):
        j = int(round((t - self.times[0]) / self.dt))
        if j < 0 or j >= self.n_time or abs(self.times[j] - t) > 1e-9 * max(self.dt, abs(t)):
            raise ValueError(f"t={t} is not a node of the time window "
                             f"[{self.times[0]}, {self.times[-1]}]")
        return j

    def origin_index(self):
        return self.time_index(0.0)

    def at(self, j):
        return SpectralField(self.grid, self.coeffs[j], self.real)

    def physical(self):
        vals = np.fft.ifft(self.coeffs, axis=1) * (self.grid.n_modes / self.grid.period)
        return vals.real if self.real else vals

    def window(self, profile):
        """Multiply every time slice by ``profile`` (samples on ``times``)."""
        profile = np.asarray(profile)
        return self.with_coeffs(self.coeffs * profile[:, None])

    def __add__(self, other):
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__


def time_transform(samples, dt, t0, pad=DEFAULT_PAD, axis=0):
    """Zero-padded f^(tau_m) = dt sum_j e^{-2 pi i tau_m t_j} f_j along ``axis``.

    Returns ``(tau, values)`` with tau in FFT order.
    """
    samples = np.asarray(samples)
    n = samples.shape[axis]
    if pad < 1 or int(pad) != pad:
        raise ValueError(f"pad must be a positive integer, got {pad}")
    m = int(pad) * n
    tau = np.fft.fftfreq(m, d=dt)
    shape = [1] * samples.ndim
    shape[axis] = m
    shift = np.exp(-2j * np.pi * tau * t0).reshape(shape)
    return tau, dt * shift * np.fft.fft(samples, n=m, axis=axis)


def st_transform(f, pad=DEFAULT_PAD):
    """Space-time transform u^(k, tau); returns ``(tau, table)`` of shape (M, N)."""
    return time_transform(f.coeffs, f.dt, f.times[0], pad)


def interaction_frame(f):
    """w(k, t) = exp(-2 pi i 4 pi^2 k^3 t) u^(k, t)."""
    return f.coeffs * np.conj(dispersion_phase(f.grid, f.times))


def modulated_spectrum(f, pad=DEFAULT_PAD):
    """``(sigma, table)`` with table[m, k] = u^(k, sigma_m + 4 pi^2 k^3)."""
    return time_transform(interaction_frame(f), f.dt, f.times[0], pad)


def bracket(x):
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


def _dtau(sigma):
    return abs(sigma[1] - sigma[0])


def _space_sum(grid, per_mode, s):
    return float(np.sqrt(np.sum(grid.bracket() ** (2.0 * s) * per_mode) / grid.period))


def ysb_norm(f, s, b, pad=DEFAULT_PAD):
    """Discrete Y_{s,b}: weights <k>^s <tau - 4 pi^2 k^3>^b on an L^2_k L^2_tau norm."""
    sigma, w = modulated_spectrum(f, pad)
    weight = bracket(sigma)[:, None] ** (2.0 * b)
    per_mode = np.sum(weight * np.abs(w) ** 2, axis=0) * _dtau(sigma)
    return _space_sum(f.grid, per_mode, s)


def _l1_tau_term(f, s, b, pad, sigma=None, w=None):
    if w is None:
        sigma, w = modulated_spectrum(f, pad)
    weight = bracket(sigma)[:, None] ** b
    per_mode = (np.sum(weight * np.abs(w), axis=0) * _dtau(sigma)) ** 2
    return _space_sum(f.grid, per_mode, s)


def ys_norm(f, s, pad=DEFAULT_PAD):
    """Y^s = Y_{s,1/2} + ||<k>^s u^||_{L^2_k L^1_tau}."""
    sigma, w = modulated_spectrum(f, pad)
    dtau = _dtau(sigma)
    l2 = np.sum(bracket(sigma)[:, None] * np.abs(w) ** 2, axis=0) * dtau
    l1 = (np.sum(np.abs(w), axis=0) * dtau) ** 2
    return _space_sum(f.grid, l2, s) + _space_sum(f.grid, l1, s)


def zs_norm(f, s, pad=DEFAULT_PAD):
    """Z^s = Y_{s,-1/2} + ||<k>^s u^ / <tau - 4 pi^2 k^3>||_{L^2_k L^1_tau}."""
    sigma, w = modulated_spectrum(f, pad)
    dtau = _dtau(sigma)
    br = bracket(sigma)[:, None]
    l2 = np.sum(np.abs(w) ** 2 / br, axis=0) * dtau
    l1 = (np.sum(np.abs(w) / br, axis=0) * dtau) ** 2
    return _space_sum(f.grid, l2, s) + _space_sum(f.grid, l1, s)


@dataclass(frozen=True)
class NormSpec:
    s: float
    b: float = 0.0
    family: str = "Hs"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.family == "Ysb" and not -1.0 <= self.b <= 1.0:
            raise ValueError(f"b must lie in [-1, 1], got {self.b}")

    def evaluate(self, field, pad=DEFAULT_PAD):
        if self.family == "Hs":
            if not isinstance(field, SpectralField):
                raise TypeError("Hs norm needs a SpectralField")
            return sobolev_norm(field, self.s)
        if not isinstance(field, SpaceTimeField):
            raise TypeError(f"{self.family} norm needs a SpaceTimeField")
        if self.family == "Ysb":
            return ysb_norm(field, self.s, self.b, pad)
        if self.family == "Ys":
            return ys_norm(field, self.s, pad)
        return zs_norm(field, self.s, pad)


def time_sobolev_norm(samples, dt, b, t0=0.0, pad=DEFAULT_PAD):
    """H^b_t norm (int <tau>^{2b} |f^(tau)|^2 dtau)^{1/2} of a sampled series.

    ``samples`` may carry extra trailing axes; the norm is taken per column.
    """
    tau, fh = time_transform(samples, dt, t0, pad)
    weight = bracket(tau) ** (2.0 * b)
    if fh.ndim > 1:
        weight = weight.reshape((-1,) + (1,) * (fh.ndim - 1))
    return np.sqrt(np.sum(weight * np.abs(fh) ** 2, axis=0) * _dtau(tau))


def time_l1_tau(samples, dt, b=0.0, t0=0.0, pad=DEFAULT_PAD):
    """int <tau>^b |f^(tau)| dtau by the same Riemann rule."""
    tau, fh = time_transform(samples, dt, t0, pad)
    weight = bracket(tau) ** b
    if fh.ndim > 1:
        weight = weight.reshape((-1,) + (1,) * (fh.ndim - 1))
    return np.sum(weight * np.abs(fh), axis=0) * _dtau(tau)


# ---- smooth cutoff -------------------------------------------------------

def _logistic(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _step_parts(x):
    """S(x), p = 1 - S(x) and the log-derivative pieces q, q' on the open interval (0, 1).

    S and p are both formed as logistics so neither suffers cancellation.
    """
    x = np.clip(x, 1e-300, 1.0 - 1e-16)
    y = 1.0 - x
    with np.errstate(over="ignore"):
        z = np.clip(1.0 / x - 1.0 / y, -700.0, 700.0)
    p, s = _logistic(z), _logistic(-z)
    q = -1.0 / x ** 2 - 1.0 / y ** 2
    dq = 2.0 / x ** 3 - 2.0 / y ** 3
    return s, p, q, dq


def smooth_step(x, order=0):
    """C-infinity step S: 0 for x <= 0, 1 for x >= 1, S = g(x)/(g(x)+g(1-x)), g = e^{-1/x}.

    ``order`` selects S, S' or S''.
    """
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    out = np.zeros_like(x)
    if order == 0:
        out[x >= 1] = 1.0
    if np.any(inside):
        sv, p, q, dq = _step_parts(x[inside])
        pm = p * sv
        if order == 0:
            out[inside] = sv
        elif order == 1:
            out[inside] = -q * pm
        elif order == 2:
            with np.errstate(over="ignore", invalid="ignore"):
                val = -pm * (dq + q * q * (1.0 - 2.0 * p))
            out[inside] = np.where(pm > 0, val, 0.0)
        else:
            raise ValueError("order must be 0, 1 or 2")
    return out


def psi(t, order=0):
    """Base cutoff: 1 on [-1, 1], 0 outside (-2, 2), smooth and even."""
    t = np.asarray(t, dtype=float)
    val = smooth_step(2.0 - np.abs(t), order)
    if order == 1:
        val = -np.sign(t) * val
    return val


def psi_T(t, T, order=0):
    return psi(np.asarray(t, dtype=float) / T, order) / T ** order


def psi_tilde_T(t, T):
    t = np.asarray(t, dtype=float)
    return np.sign(t) * psi_T(t, T)


def _sup_abs(fn, lo, hi, n=200001):
    x = np.linspace(lo, hi, n)
    v = np.abs(fn(x))
    j = int(np.argmax(v))
    # golden-section polish around the grid maximum
    a, b = x[max(j - 1, 0)], x[min(j + 1, n - 1)]
    r = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - r * (b - a), a + r * (b - a)
    for _ in range(80):
        if abs(fn(np.array([c]))[0]) > abs(fn(np.array([d]))[0]):
            b = d
        else:
            a = c
        c, d = b - r * (b - a), a + r * (b - a)
    return float(max(v[j], abs(fn(np.array([0.5 * (a + b)]))[0])))


_SUP_CACHE = {}


def psi_sup_norms():
    """(||Psi||_inf, ||Psi'||_inf, ||Psi''||_inf) for the base cutoff."""
    if "base" not in _SUP_CACHE:
        d1 = _sup_abs(lambda x: smooth_step(x, 1), 0.0, 1.0)
        d2 = _sup_abs(lambda x: smooth_step(x, 2), 0.0, 1.0)
        _SUP_CACHE["base"] = (1.0, d1, d2)
    return _SUP_CACHE["base"]


def cutoff_constant():
    """C_psi = max of the three sup norms of the base cutoff."""
    return max(psi_sup_norms())


@dataclass(frozen=True, eq=False)
class CutoffProfile:
    name: str
    T: float
    times: np.ndarray
    values: np.ndarray
    sup_norms: tuple

    @property
    def constant(self):
        return max(self.sup_norms)


def cutoff_profile(name="psi", T=1.0, times=None, n=4097):
    """Sampled cutoff ``psi``, ``psi_T`` or ``psi_tilde_T`` with derivative sup norms.

    Sup norms of ``psi_tilde_T`` are those of ``psi_T`` away from the jump at 0.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if name == "psi":
        T = 1.0
    elif name not in ("psi_T", "psi_tilde_T"):
        raise ValueError(f"unknown cutoff {name!r}")
    if times is None:
        times = np.linspace(-2.0 * T, 2.0 * T, n)
    times = np.asarray(times, dtype=float)
    values = psi_tilde_T(times, T) if name == "psi_tilde_T" else psi_T(times, T)
    base = psi_sup_norms()
    sups = (base[0], base[1] / T, base[2] / T ** 2)
    return CutoffProfile(name, float(T), times, values, sups)
