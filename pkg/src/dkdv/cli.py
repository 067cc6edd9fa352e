"""Command-line front end: ``dkdv <command> [--config run.json] [overrides]``.

A run is described by one JSON document.  Defaults are merged with the
config file and then with command-line overrides; the fully resolved
document is written to ``manifest.json`` next to the artifacts, and passing
that manifest back through ``--config`` repeats the run exactly.

Exit status: 0 success, 2 invalid configuration, 3 numerical blow-up or
divergence, 4 estimate failure.
"""
import argparse
import copy
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import estimates as est
from .bourgain import SpaceTimeField, psi, window_times, ys_norm, ysb_norm, zs_norm
from .picard import PicardConfig, picard_iterate
from .propagator import evolve_linear, group_multiplier
from .rescaling import choose_sigma, rescale
from .snapshot import SnapshotFormatError, atomic_write_bytes, load_snapshot, save_snapshot
from .solver import BlowUpError, SolverConfig, simulate
from .spectral import PeriodicGrid, from_modes, l2_norm, random_field, sobolev_norm
from .symbols import symbol_from_spec

COMMANDS = ("simulate", "linear", "picard", "norms", "verify", "rescale")

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_ESTIMATE = 0, 2, 3, 4

DEFAULTS = {
    "command": None,
    "seed": 0,
    "out": "dkdv-out",
    "grid": {"lambda": 1.0, "n_modes": 64},
    "symbol": {"name": "kdv_burgers", "eta": 1.0},
    "initial": {"kind": "modes", "modes": {"1": [0.05, 0.0]}},
    "solver": {"dt": 1e-3, "t_end": 1.0, "snapshot_stride": 100, "dealias": True,
               "enforce_mean_zero": True, "hs_indices": [1.0], "resolution_c": 1.0},
    "linear": {"times": [0.1, 1.0]},
    "picard": {"T": 0.25, "n_time": 1024, "max_iters": 50, "tol": 1e-12, "cutoff": "psi_T"},
    "norms": {"s": -0.5, "b": 0.5, "t_w": 2.0, "n_time": 2048, "pad": 2},
    "verify": {"estimate": "damped_kernel", "trials": 100, "s": -0.5, "T": 0.5, "beta": 16.0},
    "rescale": {"sigma": None, "threshold": 0.5, "epsilon": 0.01},
}

# flag -> config paths it overrides
OVERRIDES = {
    "lambda": ["grid.lambda"],
    "n_modes": ["grid.n_modes"],
    "symbol": ["symbol.name"],
    "eta": ["symbol.eta"],
    "dt": ["solver.dt"],
    "t_end": ["solver.t_end"],
    "T": ["picard.T", "verify.T"],
    "beta": ["verify.beta"],
    "s": ["norms.s", "verify.s"],
    "b": ["norms.b"],
    "trials": ["verify.trials"],
    "estimate": ["verify.estimate"],
    "seed": ["seed"],
    "out": ["out"],
}


class ConfigError(ValueError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


# optional keys a symbol spec may add to the defaults
SYMBOL_KEYS = {"name", "eta", "table", "gamma", "convention", "margin"}


def _merge(base, extra, path=""):
    for key, value in extra.items():
        where = f"{path}.{key}" if path else key
        if path == "symbol" and key in SYMBOL_KEYS:
            base[key] = value
            continue
        if key not in base:
            raise ConfigError(where, "unknown field")
        if isinstance(base[key], dict) and key not in ("initial",):
            if not isinstance(value, dict):
                raise ConfigError(where, "expected a JSON object")
            _merge(base[key], value, where)
        else:
            base[key] = value


def _set(cfg, path, value):
    *head, last = path.split(".")
    node = cfg
    for part in head:
        node = node[part]
    node[last] = value


def load_config_file(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config", "top level must be a JSON object")
    # manifests wrap the resolved config
    if "config" in doc and "artifacts" in doc:
        doc = doc["config"]
    return doc


def resolve_config(command=None, config_doc=None, overrides=None):
    cfg = copy.deepcopy(DEFAULTS)
    if config_doc:
        _merge(cfg, config_doc)
    for flag, value in (overrides or {}).items():
        if value is None:
            continue
        for path in OVERRIDES[flag]:
            _set(cfg, path, value)
    if command is not None:
        cfg["command"] = command
    if cfg["command"] not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}, got {cfg['command']!r}")
    return cfg


# ---- validation helpers ---------------------------------------------------

def _number(cfg, path, positive=False, integer=False, allow_none=False):
    node = cfg
    for part in path.split("."):
        node = node[part]
    if node is None and allow_none:
        return None
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(path, f"expected a number, got {node!r}")
    if not math.isfinite(node):
        raise ConfigError(path, "must be finite")
    if integer and int(node) != node:
        raise ConfigError(path, f"expected an integer, got {node}")
    if positive and not node > 0:
        raise ConfigError(path, f"must be positive, got {node}")
    return int(node) if integer else float(node)


def _guard(path, fn, *args, **kwargs):
    """Call a constructor and tag its ValueError with the config path."""
    try:
        return fn(*args, **kwargs)
    except (ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        raise ConfigError(path, str(msg)) from None


def build_grid(cfg):
    lam = _number(cfg, "grid.lambda", positive=True)
    n = _number(cfg, "grid.n_modes", positive=True, integer=True)
    return _guard("grid.n_modes", PeriodicGrid, lam, n)


def build_symbol(cfg):
    spec = cfg["symbol"]
    if not isinstance(spec, dict):
        raise ConfigError("symbol", "expected a JSON object")
    _number(cfg, "symbol.eta")
    path = "symbol.name" if "table" not in spec else "symbol.table"
    try:
        return symbol_from_spec(spec)
    except (ValueError, KeyError) as exc:
        msg = str(exc.args[0]) if exc.args else str(exc)
        if "eta" in msg:
            path = "symbol.eta"
        elif "gamma" in msg:
            path = "symbol.gamma"
        raise ConfigError(path, msg) from None


def _complex(value, path):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        re, im = value, 0.0
    else:
        raise ConfigError(path, "amplitude must be a number or a [re, im] pair")
    return complex(float(re), float(im))


def build_initial(cfg, grid):
    spec = cfg["initial"]
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("initial", "expected an object with a 'kind'")
    kind = spec["kind"]
    if kind == "modes":
        modes = spec.get("modes", {})
        if not isinstance(modes, dict):
            raise ConfigError("initial.modes", "expected an object mapping mode index to amplitude")
        parsed = {}
        for key, value in modes.items():
            try:
                m = int(key)
            except ValueError:
                raise ConfigError(f"initial.modes.{key}", "mode index must be an integer") from None
            parsed[m] = _complex(value, f"initial.modes.{key}")
        return _guard("initial.modes", from_modes, grid, parsed)
    if kind == "random":
        rng = np.random.default_rng(int(cfg["seed"]))
        return _guard("initial", random_field, grid, rng, float(spec.get("decay", 2.0)),
                      float(spec.get("amplitude", 0.1)), bool(spec.get("mean_zero", True)),
                      spec.get("band"))
    if kind == "snapshot":
        path = spec.get("path")
        try:
            field, _ = load_snapshot(path)
        except (OSError, TypeError) as exc:
            raise ConfigError("initial.path", f"cannot read snapshot {path!r}: {exc}") from None
        except SnapshotFormatError as exc:
            raise ConfigError("initial.path", str(exc)) from None
        if field.grid.n_modes != grid.n_modes or field.grid.period != grid.period:
            raise ConfigError("initial.path", "snapshot grid differs from grid.lambda / grid.n_modes")
        return field
    raise ConfigError("initial.kind", f"must be modes, random or snapshot, got {kind!r}")


def build_solver(cfg, grid, sym):
    s = cfg["solver"]
    dt = _number(cfg, "solver.dt", positive=True)
    t_end = _number(cfg, "solver.t_end", positive=True)
    stride = _number(cfg, "solver.snapshot_stride", positive=True, integer=True)
    res = _number(cfg, "solver.resolution_c", positive=True, allow_none=True)
    hs = s["hs_indices"]
    if not isinstance(hs, list) or not all(isinstance(x, (int, float)) for x in hs):
        raise ConfigError("solver.hs_indices", "expected a list of numbers")
    return _guard("solver", SolverConfig, grid, sym, dt, t_end, bool(s["dealias"]),
                  bool(s["enforce_mean_zero"]), stride, tuple(float(x) for x in hs), res)


def build_picard(cfg):
    p = cfg["picard"]
    T = _number(cfg, "picard.T", positive=True)
    n_time = _number(cfg, "picard.n_time", positive=True, integer=True)
    iters = _number(cfg, "picard.max_iters", positive=True, integer=True)
    tol = _number(cfg, "picard.tol", positive=True)
    try:
        return PicardConfig(T=T, n_time=n_time, max_iters=iters, tol=tol, cutoff=p["cutoff"])
    except ValueError as exc:
        msg = str(exc)
        field = next((k for k in ("T", "n_time", "cutoff", "max_iters", "tol") if k in msg), "T")
        raise ConfigError(f"picard.{field}", msg) from None


# ---- output ---------------------------------------------------------------

class Outputs:
    def __init__(self, directory):
        self.dir = directory
        self.files = []
        try:
            os.makedirs(directory, exist_ok=True)
        except OSError as exc:
            raise ConfigError("out", f"cannot create {directory}: {exc.strerror}") from None
        if not os.access(directory, os.W_OK):
            raise ConfigError("out", f"{directory} is not writable")

    def path(self, name):
        self.files.append(name)
        return os.path.join(self.dir, name)

    def json(self, name, doc):
        text = json.dumps(est._jsonable(doc), indent=2, sort_keys=True) + "\n"
        atomic_write_bytes(self.path(name), text.encode())

    def csv(self, name, header, rows):
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for row in rows:
            buf.write(",".join(f"{float(v):.17g}" for v in row) + "\n")
        atomic_write_bytes(self.path(name), buf.getvalue().encode())

    def snapshot(self, name, field, time=0.0):
        save_snapshot(field, self.path(name), time)


def write_manifest(out, cfg, status, summary):
    doc = {"config": cfg, "artifacts": sorted(set(out.files)), "status": status,
           "summary": summary, "version": __version__}
    text = json.dumps(est._jsonable(doc), indent=2, sort_keys=True) + "\n"
    atomic_write_bytes(os.path.join(out.dir, "manifest.json"), text.encode())


# ---- commands ---------------------------------------------------------------

def cmd_simulate(cfg, out):
    grid, sym = build_grid(cfg), build_symbol(cfg)
    u0 = build_initial(cfg, grid)
    scfg = build_solver(cfg, grid, sym)
    try:
        traj = _guard("initial", simulate, u0, scfg)
    except BlowUpError as exc:
        if exc.last_field is not None:
            out.snapshot("last_finite.dkdv1", exc.last_field, exc.last_time)
        return EXIT_BLOWUP, f"simulate: blow-up after t={exc.last_time:.6g}"
    traj.to_csv(out.path("trajectory.csv"))
    t_final, final = traj.snapshots[-1]
    out.snapshot("final.dkdv1", final, t_final)
    return EXIT_OK, (f"simulate: {scfg.n_steps} steps to t={t_final:.6g}, "
                     f"|u|_L2 {traj.l2[0]:.6g} -> {traj.l2[-1]:.6g}, "
                     f"integrated residual {traj.integrated_residual():.3g}")


def cmd_linear(cfg, out):
    grid, sym = build_grid(cfg), build_symbol(cfg)
    u0 = build_initial(cfg, grid)
    times = cfg["linear"]["times"]
    if not isinstance(times, list) or not times or not all(
            isinstance(t, (int, float)) and not isinstance(t, bool) and math.isfinite(t) for t in times):
        raise ConfigError("linear.times", "expected a non-empty list of finite numbers")
    rows = []
    for j, t in enumerate(times):
        u = evolve_linear(u0, sym, float(t))
        rows.append([t, u.coeffs[0].real, u.coeffs[0].imag, l2_norm(u), sobolev_norm(u, -0.5)])
        out.snapshot(f"linear_{j:03d}.dkdv1", u, float(t))
    out.csv("linear.csv", ["t", "mean_re", "mean_im", "l2", "hs(s=-0.5)"], rows)
    return EXIT_OK, f"linear: {len(times)} times, |u|_L2 at t={times[-1]:g} is {rows[-1][3]:.6g}"


def cmd_picard(cfg, out):
    grid, sym = build_grid(cfg), build_symbol(cfg)
    u0 = build_initial(cfg, grid)
    pcfg = build_picard(cfg)
    field, report = _guard("initial", picard_iterate, u0, sym, pcfg)
    out.json("picard.json", report.to_dict())
    out.csv("increments.csv", ["iteration", "increment"],
            [[i + 1, d] for i, d in enumerate(report.increments)])
    j0 = field.origin_index()
    out.snapshot("fixed_point_t0.dkdv1", field.at(j0), 0.0)
    jT = int(round((pcfg.T - field.times[0]) / field.dt))
    if jT < field.n_time and abs(field.times[jT] - pcfg.T) <= 1e-12:
        out.snapshot("fixed_point_T.dkdv1", field.at(jT), pcfg.T)
    theta = "n/a" if report.theta_hat is None else f"{report.theta_hat:.3g}"
    line = (f"picard: {report.iters} iterations, last increment "
            f"{report.increments[-1]:.3g}, theta {theta}, converged={report.converged}")
    return (EXIT_BLOWUP if report.diverged else EXIT_OK), line


def cmd_norms(cfg, out):
    grid, sym = build_grid(cfg), build_symbol(cfg)
    u0 = build_initial(cfg, grid)
    s = _number(cfg, "norms.s")
    b = _number(cfg, "norms.b")
    if not -1.0 <= b <= 1.0:
        raise ConfigError("norms.b", f"must lie in [-1, 1], got {b}")
    t_w = _number(cfg, "norms.t_w", positive=True)
    n_time = _number(cfg, "norms.n_time", positive=True, integer=True)
    pad = _number(cfg, "norms.pad", positive=True, integer=True)
    times = _guard("norms.n_time", window_times, t_w, n_time)
    coeffs = psi(times)[:, None] * group_multiplier(grid, sym, times) * u0.coeffs[None, :]
    f = SpaceTimeField(grid, times, coeffs, u0.real)
    rec = {"s": s, "b": b, "ysb": ysb_norm(f, s, b, pad), "ys": ys_norm(f, s, pad),
           "zs": zs_norm(f, s, pad), "hs_data": sobolev_norm(u0, s)}
    out.json("norms.json", rec)
    return EXIT_OK, f"norms: Y_(s,b) {rec['ysb']:.6g}, Y^s {rec['ys']:.6g}, Z^s {rec['zs']:.6g} (s={s:g}, b={b:g})"


def run_estimate(cfg):
    v = cfg["verify"]
    name = v["estimate"]
    if name not in est.ESTIMATES:
        raise ConfigError("verify.estimate", f"must be one of {', '.join(est.ESTIMATES)}, got {name!r}")
    trials = _number(cfg, "verify.trials", positive=True, integer=True)
    seed = _number(cfg, "seed", integer=True)
    if name == "damped_kernel":
        return est.check_damped_kernel(trials, seed)
    if name == "kernel_comparison":
        return est.check_kernel_comparison(trials, seed)
    if name == "cutoff_bounds":
        return est.check_cutoff_bounds(seed=seed)
    if name == "ia_smoothing":
        return est.check_ia_smoothing(trials, seed)
    if name == "bilinear":
        grid = build_grid(cfg)
        setup = est.BilinearSetup(period=grid.period)
        return est.check_bilinear(trials, seed, setup)
    grid, sym = build_grid(cfg), build_symbol(cfg)
    s = _number(cfg, "verify.s")
    if name == "free_term":
        u0 = build_initial(cfg, grid)
        return _guard("initial", est.check_free_term, u0, sym, s, seed=seed)
    T = _number(cfg, "verify.T", positive=True)
    beta = _number(cfg, "verify.beta", positive=True)
    F = est.single_mode_forcing(grid, 1, 200.0, max(2.0, 2.0 * T))
    return _guard("verify.T", est.check_forcing_term, F, sym, s, T, beta, seed=seed)


def cmd_verify(cfg, out):
    rep = run_estimate(cfg)
    out.json("report.json", rep.to_dict())
    status = EXIT_OK if rep.passed else EXIT_ESTIMATE
    return status, (f"verify {rep.estimate_id}: {rep.trials} trials, worst ratio {rep.worst_ratio:.4g}, "
                    f"{'pass' if rep.passed else 'FAIL'}")


def cmd_rescale(cfg, out):
    grid, sym = build_grid(cfg), build_symbol(cfg)
    u0 = build_initial(cfg, grid)
    r = cfg["rescale"]
    sigma = _number(cfg, "rescale.sigma", allow_none=True)
    norm = sobolev_norm(u0, -0.5)
    if sigma is None:
        thr = _number(cfg, "rescale.threshold")
        eps = _number(cfg, "rescale.epsilon")
        path = "rescale.threshold" if not 0 < thr < 1 else "rescale.epsilon"
        sigma = _guard(path, choose_sigma, norm, grid.period, thr, eps, sym.alpha)
    res = _guard("rescale.sigma", rescale, u0, sym, sigma)
    out.snapshot("rescaled.dkdv1", res.v0)
    new_norm = sobolev_norm(res.v0, -0.5)
    out.json("rescale.json", {"sigma": res.sigma, "new_period": res.new_period,
                              "hs_before": norm, "hs_after": new_norm,
                              "symbol": res.new_symbol.spec, "threshold": r["threshold"]})
    return EXIT_OK, f"rescale: sigma {res.sigma:.6g}, period {res.new_period:.6g}, H^-1/2 {norm:.4g} -> {new_norm:.4g}"


HANDLERS = {"simulate": cmd_simulate, "linear": cmd_linear, "picard": cmd_picard,
            "norms": cmd_norms, "verify": cmd_verify, "rescale": cmd_rescale}


def run(cfg):
    """Execute a resolved config; returns ``(exit_status, summary_line)``."""
    out = Outputs(cfg["out"])
    status, line = HANDLERS[cfg["command"]](cfg, out)
    write_manifest(out, cfg, status, line)
    return status, line


def build_parser():
    p = argparse.ArgumentParser(prog="dkdv", description="Dissipative KdV solver and estimate harness.")
    p.add_argument("command", nargs="?", choices=COMMANDS,
                   help="what to run (may come from --config instead)")
    p.add_argument("--config", help="JSON run config or a manifest.json from an earlier run")
    p.add_argument("--lambda", dest="lambda", type=float, help="spatial period")
    p.add_argument("--n-modes", dest="n_modes", type=int, help="number of Fourier modes (even)")
    p.add_argument("--symbol", help="dissipation symbol name")
    p.add_argument("--eta", type=float, help="dissipation strength")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--t-end", dest="t_end", type=float, help="final time")
    p.add_argument("--T", dest="T", type=float, help="time window half-size")
    p.add_argument("--beta", type=float)
    p.add_argument("--s", type=float, help="Sobolev index")
    p.add_argument("--b", type=float, help="modulation index")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--estimate", help=f"estimate id: {', '.join(est.ESTIMATES)}")
    p.add_argument("--out", help="output directory")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in OVERRIDES}
    try:
        doc = load_config_file(args.config) if args.config else None
        cfg = resolve_config(args.command, doc, overrides)
        status, line = run(cfg)
    except ConfigError as exc:
        print(f"dkdv: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(line)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
