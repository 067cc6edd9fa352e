"""Scale change v(x, t) = sigma^-2 u(x / sigma, t / sigma^3) onto the period sigma * lambda."""
from dataclasses import dataclass

import numpy as np

from .spectral import PeriodicGrid, SpectralField
from .symbols import rescaled_symbol


@dataclass(frozen=True, eq=False)
class RescaleResult:
    sigma: float
    new_period: float
    v0: SpectralField
    new_symbol: object

    def time_forward(self, t):
        """Time in the rescaled problem that corresponds to original time ``t``."""
        return self.sigma ** 3 * t

    def map_back(self, v):
        """u^(m) = sigma v^(m) on the original period."""
        grid = PeriodicGrid(self.new_period / self.sigma, v.grid.n_modes)
        return SpectralField(grid, self.sigma * v.coeffs, v.real)


def rescale(u0, sym, sigma):
    """Rescale data and symbol by ``sigma >= 1``.

    Mode m of the new grid has frequency m/(sigma lam), so sigma k = m/lam is
    always an original frequency and v^_0(m) = u^_0(m)/sigma for any real sigma.
    """
    sigma = float(sigma)
    if not (np.isfinite(sigma) and sigma >= 1.0):
        raise ValueError(f"sigma must be a real number >= 1, got {sigma}")
    grid = PeriodicGrid(sigma * u0.grid.period, u0.grid.n_modes)
    v0 = SpectralField(grid, u0.coeffs / sigma, u0.real)
    new_sym = rescaled_symbol(sym, sigma)
    bound = sym.alpha / sigma ** 3
    if np.max(new_sym.evaluate(grid)) > bound * (1 + 1e-12) + 1e-300:
        raise ArithmeticError("rescaled symbol exceeds alpha / sigma^3")
    return RescaleResult(sigma, grid.period, v0, new_sym)


def choose_sigma(u0_norm, lambda0, threshold, epsilon, alpha=1.0):
    """Smallest sigma >= max(1, alpha) with (sigma lambda0)^eps sigma^-1 u0_norm <= threshold.

    The left side is strictly decreasing in sigma, so the root has a closed form.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if not 0 < epsilon <= 0.1:
        raise ValueError(f"epsilon must lie in (0, 0.1], got {epsilon}")
    if not lambda0 > 0:
        raise ValueError(f"lambda0 must be positive, got {lambda0}")
    if not u0_norm >= 0:
        raise ValueError(f"u0_norm must be non-negative, got {u0_norm}")
    floor = max(1.0, float(alpha))
    if u0_norm == 0:
        return floor
    root = (u0_norm * lambda0 ** epsilon / threshold) ** (1.0 / (1.0 - epsilon))
    return max(floor, float(root))
