import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkdv import _accel
from dkdv.kernels import (cumulative_exponential_quadrature, cycles_scale, exponential_moments,
                          panel_weights, reduced_cycles, two_sided_quadrature)

mp.mp.dps = 40


def mp_moment(z, span, n):
    z = mp.mpc(z.real, z.imag)
    return complex(mp.quad(lambda s: mp.exp(z * s) * s ** n, [0, span]))


@pytest.mark.parametrize("z", [0.0, 1e-6 - 2e-7j, 0.5 + 1.2j, -1.99, 2.01j, -30 + 5j, 80j, 3.0])
@pytest.mark.parametrize("span", [1.0, 2.0])
def test_moments_against_mpmath(z, span):
    got = exponential_moments(np.array([z]), span)[0]
    for n in range(3):
        ref = mp_moment(complex(z), span, n)
        assert abs(got[n] - ref) <= 1e-13 * max(1.0, abs(ref))


@pytest.mark.parametrize("radius", [1.9999, 2.0001])
def test_moments_accurate_on_both_sides_of_series_switch(radius):
    z = radius * np.exp(0.3j)
    got = exponential_moments(np.array([z]), 2.0)[0]
    for n in range(3):
        ref = mp_moment(z, 2.0, n)
        assert abs(got[n] - ref) <= 1e-13 * abs(ref)


@pytest.mark.parametrize("span", [1.0, 2.0])
def test_panel_weights_exact_on_quadratics(span):
    z = np.array([0.0, -0.7 + 3j, 25j, -40.0])
    w = panel_weights(z, span)
    for p in (lambda u: 1.0 + 0 * u, lambda u: u, lambda u: u * u):
        vals = np.array([p(0.0), p(1.0), p(2.0)])
        for zi, wi in zip(z, w):
            ref = complex(mp.quad(lambda s: mp.exp(mp.mpc(zi.real, zi.imag) * (span - s)) * p(s), [0, span]))
            assert abs(np.dot(wi, vals) - ref) <= 1e-12 * max(1.0, abs(ref))


def closed_form_quadratic(mu, t, c0, c1, c2):
    """int_0^t e^{mu (t - s)} (c0 + c1 s + c2 s^2) ds."""
    mu = mp.mpc(mu.real, mu.imag)
    return complex(mp.quad(lambda s: mp.exp(mu * (t - s)) * (c0 + c1 * s + c2 * s * s), [0, t]))


@pytest.mark.parametrize("jit", [False, True])
def test_cumulative_exact_for_quadratic_forcing(jit):
    if jit and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    h = 0.05
    t = h * np.arange(21)
    mu = np.array([-3.0 + 40j, 0.0, 2.0 - 1j])
    f = np.tile(1.0 - 2.0 * t + 0.5 * t * t, (3, 1))
    out = cumulative_exponential_quadrature(f, mu, h, jit=jit)
    for r in range(3):
        for n in (1, 2, 7, 20):
            ref = closed_form_quadratic(complex(mu[r]), t[n], 1.0, -2.0, 0.5)
            assert abs(out[r, n] - ref) <= 1e-12 * max(1.0, abs(ref))


def test_fourth_order_for_smooth_forcing():
    mu = np.array([-2.0 + 300j])
    errs = []
    ref = complex(mp.quad(lambda s: mp.exp(mp.mpc(-2, 300) * (1 - s)) * mp.cos(3 * s), mp.linspace(0, 1, 200)))
    # |mu| h is still 1.9 at n = 160; the asymptotic rate shows from there on
    for n in (160, 320, 640):
        h = 1.0 / n
        t = h * np.arange(n + 1)
        out = cumulative_exponential_quadrature(np.cos(3 * t)[None, :], mu, h)
        errs.append(abs(out[0, -1] - ref))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 3.7)


def test_two_sided_constant_forcing():
    h = 0.01
    origin = 100
    t = h * (np.arange(251) - origin)
    mu_f, mu_b = np.array([-1.0 + 20j]), np.array([-1.0 - 20j])
    out = two_sided_quadrature(np.ones((1, t.size)), mu_f, mu_b, h, origin)[0]
    fwd = (np.exp(mu_f[0] * t) - 1) / mu_f[0]
    bwd = -(np.exp(mu_b[0] * np.abs(t)) - 1) / mu_b[0]
    expect = np.where(t >= 0, fwd, bwd)
    np.testing.assert_allclose(out, expect, atol=1e-13)
    assert out[origin] == 0


def test_two_sided_short_sides():
    h = 0.1
    f = np.ones((1, 3))
    for origin in (0, 1, 2):
        out = two_sided_quadrature(f, np.array([0.0]), np.array([0.0]), h, origin)[0]
        np.testing.assert_allclose(out, h * (np.arange(3) - origin), atol=1e-15)


def test_cumulative_input_validation():
    with pytest.raises(ValueError):
        cumulative_exponential_quadrature(np.ones((2, 2)), np.zeros(2), 0.1)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 31), rows=st.integers(1, 6), nodes=st.integers(3, 64),
       h=st.floats(1e-3, 1.0))
def test_jit_and_numpy_agree(seed, rows, nodes, h):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((rows, nodes)) + 1j * rng.standard_normal((rows, nodes))
    mu = -rng.uniform(0, 30, rows) + 1j * rng.uniform(-500, 500, rows)
    a = cumulative_exponential_quadrature(f, mu, h, jit=False)
    b = cumulative_exponential_quadrature(f, mu, h, jit=True)
    assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(a)))


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("DKDV_NO_JIT", "1")
    assert not _accel.use_jit()
    monkeypatch.setenv("DKDV_NO_JIT", "0")
    assert _accel.use_jit() == _accel.HAVE_NUMBA


@pytest.mark.parametrize("lam", [1.0, 0.7, 3.0])
@pytest.mark.parametrize("t", [0.1, -1.0, 1.0, 37.25])
def test_reduced_cycles_against_mpmath(lam, t):
    m = np.arange(-32, 33)
    got = reduced_cycles(m, cycles_scale(lam, t))
    for mi, g in zip(m, got):
        x = 4 * mp.pi ** 2 * mp.mpf(t) * mp.mpf(int(mi)) ** 3 / mp.mpf(lam) ** 3
        ref = float(x - mp.floor(x))
        d = abs(g - ref)
        # a few long-double roundings of a product of size |x|
        assert min(d, 1 - d) < 1e-18 * float(abs(x)) + 1e-15


def test_reduced_cycles_vectorized_rows():
    m = np.arange(8)
    ts = np.array([0.1, 0.2, -0.3])
    rows = reduced_cycles(m, cycles_scale(1.0, ts))
    assert rows.shape == (3, 8)
    for j, t in enumerate(ts):
        np.testing.assert_array_equal(rows[j], reduced_cycles(m, cycles_scale(1.0, t)))
