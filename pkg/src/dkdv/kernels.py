"""Exponential-kernel quadrature kernels.

The core primitive is the cumulative integral

    Y(t_n) = \\int_{t_0}^{t_n} exp(mu (t_n - t')) F(t') dt'

evaluated at every node of a uniform grid, per mode, with ``F`` replaced by
its piecewise-quadratic interpolant and the exponential integrated exactly.
Two interleaved chains advance by ``Y(t_{n+2}) = e^{2 mu h} Y(t_n) + panel``;
the odd chain is started with a one-step partial panel.  The scheme is exact
for quadratic ``F`` and fourth-order accurate for smooth ``F`` regardless of
how large ``|mu| h`` is.

``cumulative_exponential_quadrature`` dispatches to the numba kernel or the
numpy fallback according to :func:`dkdv._accel.use_jit`.
"""
import numpy as np

from ._accel import njit, use_jit

_PI_LONG = np.longdouble("3.14159265358979323846264338327950288")
_SERIES_RADIUS = 2.0
_SERIES_TERMS = 48

# Lagrange basis on nodes u = 0, 1, 2 as (constant, linear, quadratic) coefficients.
_LAGRANGE = np.array([
    [1.0, -1.5, 0.5],
    [0.0, 2.0, -1.0],
    [0.0, -0.5, 0.5],
])


def exponential_moments(z, span):
    """Moments ``M_n = int_0^span e^{z s} s^n ds`` for ``n = 0, 1, 2``.

    Returns an array of shape ``z.shape + (3,)``.  A Taylor series is used
    for ``|z| < 2`` where the closed-form recurrence cancels badly.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (3,), dtype=complex)
    small = np.abs(z) < _SERIES_RADIUS

    if np.any(small):
        zs = z[small]
        acc = np.zeros(zs.shape + (3,), dtype=complex)
        term = np.ones_like(zs)
        for j in range(_SERIES_TERMS):
            for n in range(3):
                acc[..., n] += term * span ** (n + j + 1) / (n + j + 1)
            term = term * zs / (j + 1)
        out[small] = acc

    big = ~small
    if np.any(big):
        zb = z[big]
        e = np.exp(zb * span)
        m0 = (e - 1.0) / zb
        m1 = (span * e - m0) / zb
        m2 = (span * span * e - 2.0 * m1) / zb
        out[big] = np.stack([m0, m1, m2], axis=-1)
    return out


def panel_weights(z, span):
    """Weights ``w`` with ``int = h * sum_i w_i F_i`` over a panel of ``span`` steps.

    The panel starts at interpolation node 0, ends at node ``span`` (1 or 2),
    and the kernel is ``exp(z (span - u))`` in step units ``u``.
    """
    moments = exponential_moments(z, span)
    weights = np.empty(moments.shape, dtype=complex)
    for i, (a, b, c) in enumerate(_LAGRANGE):
        # l_i(span - s) expanded in powers of s
        coef = (a + b * span + c * span * span, -b - 2.0 * c * span, c)
        weights[..., i] = coef[0] * moments[..., 0] + coef[1] * moments[..., 1] + coef[2] * moments[..., 2]
    return weights


@njit(cache=True)
def _cumulative_jit(f, e2, w1, w2, h, out):
    nk, m = f.shape
    for k in range(nk):
        out[k, 0] = 0.0
        out[k, 1] = h * (w1[k, 0] * f[k, 0] + w1[k, 1] * f[k, 1] + w1[k, 2] * f[k, 2])
        for n in range(2, m):
            out[k, n] = e2[k] * out[k, n - 2] + h * (
                w2[k, 0] * f[k, n - 2] + w2[k, 1] * f[k, n - 1] + w2[k, 2] * f[k, n]
            )


def _cumulative_numpy(f, e2, w1, w2, h, out):
    m = f.shape[1]
    out[:, 0] = 0.0
    out[:, 1] = h * np.einsum("ki,ki->k", w1, f[:, 0:3])
    for n in range(2, m):
        out[:, n] = e2 * out[:, n - 2] + h * (
            w2[:, 0] * f[:, n - 2] + w2[:, 1] * f[:, n - 1] + w2[:, 2] * f[:, n]
        )


def cumulative_exponential_quadrature(f, mu, h, jit=None):
    """Cumulative exponential-kernel integrals of ``f`` along its last axis.

    Parameters
    ----------
    f : complex array (nk, m), samples on a uniform grid starting at t_0, m >= 3
    mu : complex array (nk,), per-row kernel exponent
    h : grid spacing
    jit : force (True) or forbid (False) the numba kernel; None follows the env flag
    """
    f = np.ascontiguousarray(f, dtype=complex)
    if f.ndim != 2 or f.shape[1] < 3:
        raise ValueError("need a (rows, nodes) array with at least 3 nodes")
    mu = np.broadcast_to(np.asarray(mu, dtype=complex), f.shape[:1])
    z = mu * h
    w1 = np.ascontiguousarray(panel_weights(z, 1.0))
    w2 = np.ascontiguousarray(panel_weights(z, 2.0))
    e2 = np.ascontiguousarray(np.exp(2.0 * z))
    out = np.empty_like(f)
    if jit is None:
        jit = use_jit()
    if jit:
        _cumulative_jit(f, e2, w1, w2, float(h), out)
    else:
        _cumulative_numpy(f, e2, w1, w2, float(h), out)
    return out


def two_sided_quadrature(f, mu_forward, mu_backward, h, origin, jit=None):
    """``int_0^t K(t - t') F(t') dt'`` on a grid straddling ``t = 0``.

    ``origin`` is the column index of ``t = 0``.  Forward in time the kernel
    is ``exp(mu_forward s)``; for ``t < 0`` the integral is taken over
    ``[t, 0]`` with orientation sign and kernel ``exp(mu_backward |s|)``.
    """
    f = np.asarray(f, dtype=complex)
    out = np.zeros_like(f)
    m = f.shape[1]
    if m - origin >= 3:
        out[:, origin:] = cumulative_exponential_quadrature(f[:, origin:], mu_forward, h, jit)
    elif m - origin == 2:
        out[:, origin + 1] = 0.5 * h * (np.exp(mu_forward * h) * f[:, origin] + f[:, origin + 1])
    if origin >= 2:
        back = cumulative_exponential_quadrature(f[:, origin::-1], mu_backward, h, jit)
        out[:, : origin + 1] = -back[:, ::-1]
    elif origin == 1:
        out[:, 0] = -0.5 * h * (np.exp(mu_backward * h) * f[:, 1] + f[:, 0])
    return out


def reduced_cycles(m, scale):
    """Fractional part of ``scale * m**3`` in extended precision.

    ``m`` are integer mode indices; the product is formed in long double so
    the reduction keeps accuracy when ``scale * m**3`` is large.  An array of
    scales gives one row per scale.
    """
    m = np.asarray(m, dtype=np.int64)
    cubes = (m.astype(np.longdouble)) ** 3
    scale = np.asarray(scale, dtype=np.longdouble)
    cycles = scale[..., None] * cubes if scale.ndim else scale * cubes
    return np.asarray(cycles - np.floor(cycles), dtype=np.float64)


def cycles_scale(period, t):
    """``4 pi^2 t / period^3`` in long double, the cycle count per unit ``m^3``."""
    pi = _PI_LONG
    return 4 * pi * pi * np.asarray(t, dtype=np.longdouble) / np.longdouble(period) ** 3
