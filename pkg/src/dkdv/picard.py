"""Picard iteration for the cut-off Duhamel map on a time window [-2T, 2T)."""
from dataclasses import asdict, dataclass, field
import json
import math

import numpy as np

from .bourgain import DEFAULT_PAD, SpaceTimeField, psi, psi_T, window_times, ys_norm
from .propagator import duhamel_all, group_multiplier
from .solver import nonlinear_term

CUTOFFS = ("psi_T", "psi")


def suggested_n_time(grid, T):
    """Heuristic n_time >= 8 (4 pi^2 k_max^3)(4 T) resolving the cubic in tau.

    ``k_max`` is the largest mode kept by the 2/3 rule.  Norms here are taken
    in the interaction frame, so this is advisory only.
    """
    k_max = math.floor(grid.n_modes / 3) / grid.period
    n = math.ceil(8.0 * 4.0 * math.pi ** 2 * k_max ** 3 * 4.0 * T)
    return n + (n % 2)


@dataclass(frozen=True)
class PicardConfig:
    T: float = 0.25
    n_time: int = 1024
    max_iters: int = 50
    tol: float = 1e-12
    cutoff: str = "psi_T"
    dealias: bool = True
    pad: int = DEFAULT_PAD
    divergence_run: int = 3

    def __post_init__(self):
        if not 0 < self.T <= 0.5:
            raise ValueError(f"window T must lie in (0, 1/2], got {self.T}")
        if int(self.n_time) != self.n_time or self.n_time < 8 or self.n_time % 2:
            raise ValueError(f"n_time must be an even integer >= 8, got {self.n_time}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.cutoff not in CUTOFFS:
            raise ValueError(f"cutoff must be one of {CUTOFFS}, got {self.cutoff!r}")

    @property
    def t_w(self):
        return 2.0 * self.T


@dataclass
class PicardReport:
    iters: int
    increments: list
    theta_hat: float | None
    converged: bool
    diverged: bool = False
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _cutoff_samples(pcfg, times):
    if pcfg.cutoff == "psi":
        return psi(times)
    return psi_T(times, pcfg.T)


class PicardMap:
    """Gamma(u) = Psi V(t) u0 + Psi int_0^t V(t - t') Psi(t') N(u(t')) dt'."""

    def __init__(self, u0, sym, pcfg):
        u0.check_hermitian()
        scale = max(np.max(np.abs(u0.coeffs)), np.finfo(float).tiny)
        if abs(u0.coeffs[0]) > 1e-12 * scale:
            raise ValueError("Picard iteration needs mean-zero initial data")
        self.u0, self.sym, self.cfg = u0, sym, pcfg
        self.grid = u0.grid
        self.times = window_times(pcfg.t_w, pcfg.n_time)
        self.cut = _cutoff_samples(pcfg, self.times)
        free = group_multiplier(self.grid, sym, self.times) * u0.coeffs[None, :]
        self.free = self.cut[:, None] * free

    def field(self, coeffs):
        return SpaceTimeField(self.grid, self.times, coeffs)

    def nonlinear(self, coeffs):
        return nonlinear_term(coeffs, self.grid, self.cfg.dealias)

    def __call__(self, coeffs):
        forcing = self.field(self.cut[:, None] * self.nonlinear(coeffs))
        return self.free + self.cut[:, None] * duhamel_all(forcing, self.sym)

    def distance(self, a, b):
        return ys_norm(self.field(a - b), -0.5, self.cfg.pad)


def picard_iterate(u0, sym, pcfg, initial=None):
    """Iterate the cut-off Duhamel map from ``initial`` (default zero).

    Returns ``(SpaceTimeField, PicardReport)``.  ``increments[n]`` is the
    discrete Y^{-1/2} distance between iterates n+1 and n.  Divergence
    (``divergence_run`` consecutive increases) ends the loop without raising.
    """
    gamma = PicardMap(u0, sym, pcfg)
    if initial is None:
        current = np.zeros((pcfg.n_time, u0.grid.n_modes), dtype=complex)
    else:
        current = np.array(initial.coeffs if isinstance(initial, SpaceTimeField) else initial, dtype=complex)
    increments = []
    converged = diverged = False
    rises = 0
    for _ in range(pcfg.max_iters):
        nxt = gamma(current)
        if not np.all(np.isfinite(nxt)):
            diverged = True
            break
        d = gamma.distance(nxt, current)
        if increments and d > increments[-1]:
            rises += 1
        else:
            rises = 0
        increments.append(d)
        current = nxt
        if d <= pcfg.tol:
            converged = True
            break
        if rises >= pcfg.divergence_run:
            diverged = True
            break
    ratios = [b / a for a, b in zip(increments, increments[1:]) if a > 0]
    theta = float(np.median(ratios)) if ratios else None
    params = {"T": pcfg.T, "n_time": pcfg.n_time, "tol": pcfg.tol, "cutoff": pcfg.cutoff,
              "period": u0.grid.period, "n_modes": u0.grid.n_modes}
    report = PicardReport(len(increments), [float(x) for x in increments], theta, converged, diverged, params)
    return gamma.field(current), report
