import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkdv.spectral import PeriodicGrid, from_modes, inverse_transform, spectral_derivative
from dkdv.symbols import (BUILTINS, apply_dissipation, boundary_index, builtin_symbol, custom_symbol,
                          rescaled_symbol, symbol_from_spec)


def test_paper_symbol_formulas():
    k = np.array([-2.0, -0.5, 0.0, 0.75, 3.0])
    np.testing.assert_allclose(builtin_symbol("kdv_burgers", 1)(k), -k ** 2)
    np.testing.assert_allclose(builtin_symbol("kdv_ks", 1)(k), k ** 2 - k ** 4)
    np.testing.assert_allclose(builtin_symbol("ost", 1)(k), np.abs(k) - np.abs(k) ** 3)


def test_plug_in_values():
    ks = builtin_symbol("kdv_ks", 1.0)
    assert ks(1.0) == 0.0
    assert ks(2.0) == -12.0
    assert builtin_symbol("kdv_burgers", 1.0)(0.0) == 0.0


def test_ost_supremum_against_fine_grid():
    sym = builtin_symbol("ost", 0.5)
    kappa = np.linspace(0, 2, 2_000_001)
    brute = np.max(kappa - kappa ** 3)
    assert sym.supremum == pytest.approx(2 / (3 * math.sqrt(3)), rel=1e-15)
    assert sym.supremum == pytest.approx(brute, abs=1e-11)
    assert sym.alpha == 1.0


def test_kdv_ks_supremum():
    sym = builtin_symbol("kdv_ks", 1.0)
    kappa = np.linspace(0, 2, 200_001)
    # grid misses the maximiser 1/sqrt(2); error is O(spacing^2)
    assert sym.supremum == pytest.approx(np.max(kappa ** 2 - kappa ** 4), abs=1e-9)


def test_two_pi_convention():
    sym = builtin_symbol("kdv_burgers", 1.0, convention="2pi")
    assert sym(1.0) == pytest.approx(-4 * math.pi ** 2)


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("lam", [0.5, 1.0, 7.0, 40.0])
def test_bound_holds_on_grids(name, lam):
    sym = builtin_symbol(name, 1.0, gamma=1.25 if name == "power" else None)
    for conv in ("k", "2pi"):
        s = builtin_symbol(name, 1.0, conv, 1.25 if name == "power" else None)
        vals = s.evaluate(PeriodicGrid(lam, 64))
        assert np.max(vals) <= s.alpha
    assert sym.alpha >= 1


def test_validation():
    with pytest.raises(ValueError, match="unknown symbol"):
        builtin_symbol("burger", 1.0)
    with pytest.raises(ValueError, match="eta"):
        builtin_symbol("kdv_burgers", -1.0)
    with pytest.raises(ValueError, match="gamma"):
        builtin_symbol("power", 1.0)
    with pytest.raises(ValueError, match="convention"):
        builtin_symbol("ost", 1.0, convention="rad")


def test_custom_symbol_lookup():
    g = PeriodicGrid(1.0, 8)
    table = [[float(k), -float(k) ** 2 + 0.5] for k in g.freqs]
    sym = custom_symbol(table, 1.0, margin=0.1)
    np.testing.assert_allclose(sym.evaluate(g), -g.freqs ** 2 + 0.5)
    assert sym.alpha == 1.0
    big = custom_symbol([[0.0, 3.0], [1.0, -1.0]], 1.0, margin=0.5)
    assert big.alpha == 3.5


def test_custom_symbol_missing_frequency():
    sym = custom_symbol([[0.0, 0.0], [1.0, -1.0], [-1.0, -1.0]], 1.0)
    with pytest.raises(KeyError):
        sym(np.array([0.5]))
    with pytest.raises(KeyError):
        sym.evaluate(PeriodicGrid(1.0, 8))


def test_custom_symbol_bad_tables():
    with pytest.raises(ValueError):
        custom_symbol([], 1.0)
    with pytest.raises(ValueError):
        custom_symbol([[0.0, 1.0], [0.0, 2.0]], 1.0)
    with pytest.raises(ValueError):
        custom_symbol([[0.0, float("nan")]], 1.0)


def test_symbol_from_spec():
    sym = symbol_from_spec({"name": "ost", "eta": 0.25})
    assert sym.name == "ost" and sym.eta == 0.25
    with pytest.raises(ValueError):
        symbol_from_spec({"eta": 1.0})
    with pytest.raises(ValueError):
        symbol_from_spec({"name": "custom"})
    tab = symbol_from_spec({"name": "mine", "eta": 1.0, "table": [[0.0, 0.0], [1.0, -2.0]]})
    assert tab(1.0) == -2.0


def test_boundary_index():
    assert boundary_index(1.0) == 1.0
    assert boundary_index(1.5) == 1.5
    assert boundary_index(2.0) == 2.0
    assert boundary_index(1.25) == pytest.approx((3 - 1.25) / (4 - 2.5))
    with pytest.raises(ValueError):
        boundary_index(0.5)


def test_apply_dissipation_zero_symbol():
    g = PeriodicGrid(1.0, 8)
    f = from_modes(g, {1: 0.5, 2: 0.1j})
    assert np.all(apply_dissipation(builtin_symbol("zero", 1.0), f).coeffs == 0)


def test_apply_dissipation_burgers_against_second_derivative():
    g = PeriodicGrid(1.0, 16)
    f = from_modes(g, {1: 0.5})
    lf = apply_dissipation(builtin_symbol("kdv_burgers", 1.0), f)
    assert lf.coeffs[1] == pytest.approx(0.5)
    # k-units: L = -d_xx / (2 pi)^2
    oracle = -inverse_transform(spectral_derivative(f, 2)) / (2 * math.pi) ** 2
    np.testing.assert_allclose(inverse_transform(lf), oracle, atol=1e-14)
    np.testing.assert_allclose(inverse_transform(lf), np.cos(2 * np.pi * g.points), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(m=st.integers(-7, 7), name=st.sampled_from(["kdv_burgers", "kdv_ks", "ost"]))
def test_apply_dissipation_is_diagonal(m, name):
    g = PeriodicGrid(2.0, 16)
    sym = builtin_symbol(name, 1.0)
    c = np.zeros(16, complex)
    c[m % 16] = 1.0
    out = apply_dissipation(sym, from_modes(g, {m: 1.0}, real=False)).coeffs
    np.testing.assert_allclose(out, -sym(m / 2.0) * c)


@settings(max_examples=40, deadline=None)
@given(sigma=st.floats(1.0, 50.0), name=st.sampled_from(["kdv_burgers", "kdv_ks", "ost"]),
       lam=st.floats(0.5, 10.0))
def test_rescaled_symbol_bound(sigma, name, lam):
    sym = builtin_symbol(name, 1.0)
    new = rescaled_symbol(sym, sigma)
    g = PeriodicGrid(sigma * lam, 32)
    vals = new.evaluate(g)
    np.testing.assert_allclose(vals, sym(sigma * g.freqs) / sigma ** 3)
    assert np.max(vals) <= sym.alpha / sigma ** 3 * (1 + 1e-12)
