import csv
import io

import numpy as np
import pytest

from dkdv.propagator import evolve_linear
from dkdv.solver import BlowUpError, SolverConfig, nonlinear_term, simulate, step
from dkdv.spectral import (HermitianSymmetryError, PeriodicGrid, SpectralField, forward_transform, from_modes,
                           inverse_transform, random_field, spectral_derivative)
from dkdv.symbols import builtin_symbol, custom_symbol


def burgers(eta=1.0):
    return builtin_symbol("kdv_burgers", eta)


def soliton(g, c=1.0, x0=10.0):
    x = g.points
    return forward_transform(3 * c / np.cosh(np.sqrt(c) / 2 * (x - x0)) ** 2, g)


def test_nonlinear_term_against_physical_product():
    g = PeriodicGrid(1.0, 32)
    u = random_field(g, np.random.default_rng(1), band=10)
    got = nonlinear_term(u.coeffs, g, dealias=True)
    vals = inverse_transform(u)
    ux = inverse_transform(spectral_derivative(u, 1))
    # band 10 <= N/3, so u u_x is resolved except for the products above N/3
    expect = forward_transform(-vals * ux, g).coeffs
    keep = g.dealias_mask()
    np.testing.assert_allclose(got[keep], expect[keep], atol=1e-13)
    assert np.all(got[~keep] == 0)


def test_nonlinear_term_batched():
    g = PeriodicGrid(2.0, 16)
    stack = np.stack([random_field(g, np.random.default_rng(i)).coeffs for i in range(3)])
    out = nonlinear_term(stack, g)
    for i in range(3):
        np.testing.assert_array_equal(out[i], nonlinear_term(stack[i], g))


def test_zero_data_stays_zero():
    g = PeriodicGrid(1.0, 16)
    tr = simulate(from_modes(g, {}), SolverConfig(g, burgers(), 0.01, 0.1))
    assert np.all(tr.final.coeffs == 0)
    assert np.all(tr.l2 == 0)


def test_one_step_matches_linear_for_small_data():
    g = PeriodicGrid(1.0, 16)
    sym = builtin_symbol("zero", 0.0)
    dt = 1e-3
    for amp in (1e-3, 1e-4):
        u0 = from_modes(g, {1: amp, 2: 0.5j * amp})
        cfg = SolverConfig(g, sym, dt, dt)
        diff = np.max(np.abs(step(u0, cfg).coeffs - evolve_linear(u0, sym, dt).coeffs))
        assert diff <= 10 * dt * amp ** 2 * 2 * np.pi * 2


@pytest.mark.parametrize("c", [0.5, 1.0])
def test_soliton_l2_conserved(c):
    g = PeriodicGrid(20.0, 128)
    cfg = SolverConfig(g, builtin_symbol("zero", 0.0), 1e-3, 1.0, enforce_mean_zero=False)
    tr = simulate(soliton(g, c), cfg)
    assert np.max(np.abs(tr.l2 - tr.l2[0])) <= 1e-8 * tr.l2[0]


def test_soliton_translates_at_its_speed():
    g = PeriodicGrid(20.0, 128)
    cfg = SolverConfig(g, builtin_symbol("zero", 0.0), 1e-3, 1.0, enforce_mean_zero=False)
    tr = simulate(soliton(g, 1.0, 10.0), cfg)
    # KdV with u_xxx in x-units: the profile above moves at speed c
    target = soliton(g, 1.0, 11.0)
    err = np.max(np.abs(inverse_transform(tr.final) - inverse_transform(target)))
    assert err < 1e-3 * 3


def test_burgers_l2_nonincreasing():
    g = PeriodicGrid(1.0, 32)
    u0 = random_field(g, np.random.default_rng(2), amplitude=0.2)
    tr = simulate(u0, SolverConfig(g, burgers(0.5), 1e-3, 0.5))
    assert np.all(np.diff(tr.l2) < 0)


def test_mean_zero_data_keeps_zero_mean_exactly():
    g = PeriodicGrid(1.0, 32)
    tr = simulate(random_field(g, np.random.default_rng(4), amplitude=0.2),
                  SolverConfig(g, builtin_symbol("kdv_ks", 1.0), 1e-3, 0.2))
    assert np.all(tr.mean == 0)


def test_mean_follows_exponential_law():
    g = PeriodicGrid(1.0, 16)
    table = [[float(k), 0.5 if k == 0 else -float(k) ** 2] for k in g.freqs]
    sym = custom_symbol(table, 0.8)
    u0 = random_field(g, np.random.default_rng(5), amplitude=0.1, mean_zero=False)
    tr = simulate(u0, SolverConfig(g, sym, 1e-3, 0.5, enforce_mean_zero=False))
    expect = u0.coeffs[0] * np.exp(0.8 * 0.5 * tr.times)
    np.testing.assert_allclose(tr.mean, expect, rtol=1e-10)


def test_balance_residual_small_and_starts_at_zero():
    g = PeriodicGrid(1.0, 32)
    u0 = from_modes(g, {1: 0.05, 2: 0.01j})
    tr = simulate(u0, SolverConfig(g, burgers(), 5e-4, 0.5))
    assert tr.balance_residual[0] == 0
    assert abs(tr.integrated_residual()) <= 1e-6 * tr.l2[0] ** 2


def test_step_count_and_size():
    cfg = SolverConfig(PeriodicGrid(1.0, 8), burgers(), 0.3, 1.0)
    assert cfg.n_steps == 4
    assert cfg.step_size == 0.25
    assert SolverConfig(PeriodicGrid(1.0, 8), burgers(), 0.1, 0.3).n_steps == 3


def test_trajectory_csv(tmp_path):
    g = PeriodicGrid(1.0, 16)
    cfg = SolverConfig(g, burgers(), 0.01, 0.05, hs_indices=(-0.5, 1.0), snapshot_stride=2)
    tr = simulate(from_modes(g, {1: 0.1}), cfg)
    text = tr.to_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text() == text
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "mean_re", "mean_im", "l2", "hs(s=-0.5)", "hs(s=1)", "balance_residual"]
    assert len(rows) == 1 + cfg.n_steps + 1
    assert float(rows[-1][0]) == 0.05
    assert float(rows[1][3]) == tr.l2[0]
    assert [t for t, _ in tr.snapshots] == [0.0, tr.times[2], tr.times[4], tr.times[5]]


def test_rejects_bad_initial_data():
    g = PeriodicGrid(1.0, 16)
    cfg = SolverConfig(g, burgers(), 1e-3, 0.01)
    with pytest.raises(ValueError, match="mean-zero"):
        simulate(from_modes(g, {0: 1.0, 1: 0.1}), cfg)
    c = np.zeros(16, complex)
    c[1] = 0.1
    with pytest.raises(HermitianSymmetryError):
        simulate(SpectralField(g, c), cfg)
    with pytest.raises(ValueError, match="grid"):
        simulate(from_modes(PeriodicGrid(2.0, 16), {1: 0.1}), cfg)


def test_resolution_check():
    g = PeriodicGrid(1.0, 64)
    u0 = from_modes(g, {1: 5.0})
    with pytest.raises(ValueError, match="resolve"):
        simulate(u0, SolverConfig(g, burgers(), 1e-2, 0.1))
    simulate(u0, SolverConfig(g, burgers(), 1e-2, 0.02, resolution_c=None))


def test_config_validation():
    g = PeriodicGrid(1.0, 8)
    for kwargs in ({"dt": 0.0}, {"dt": float("nan")}, {"t_end": -1.0}, {"snapshot_stride": 0},
                   {"resolution_c": -1.0}):
        args = {"dt": 0.1, "t_end": 1.0}
        args.update(kwargs)
        with pytest.raises(ValueError):
            SolverConfig(g, burgers(), **args)


def test_blow_up_reports_last_finite_time():
    g = PeriodicGrid(1.0, 8)
    table = [[float(k), 400.0 if abs(k) == 1 else 0.0] for k in g.freqs]
    sym = custom_symbol(table, 1.0)
    with pytest.raises(BlowUpError) as err:
        simulate(from_modes(g, {1: 1e-3}), SolverConfig(g, sym, 0.01, 10.0))
    assert 0 < err.value.last_time < 10.0
    assert np.all(np.isfinite(err.value.last_field.coeffs))
