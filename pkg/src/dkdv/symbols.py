"""Dissipation symbols Phi(k) with (L u)^(k) = -Phi(k) u^(k)."""
from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np

CONVENTIONS = ("k", "2pi")
BUILTINS = ("kdv_burgers", "kdv_ks", "ost", "power", "zero")

# Phi(k) <= alpha is checked on grids with this absolute slack for rounding.
_BOUND_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class DissipationSymbol:
    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    alpha: float
    eta: float
    convention: str = "k"
    supremum: float = 0.0
    even: bool = True
    spec: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.eta < 0 or not np.isfinite(self.eta):
            raise ValueError(f"eta must be a non-negative real, got {self.eta}")
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")

    def __call__(self, k):
        return np.asarray(self.phi(np.asarray(k, dtype=float)), dtype=float)

    def evaluate(self, grid):
        """Phi on the grid frequencies, with the upper bound verified."""
        values = self(grid.freqs)
        if values.shape != grid.freqs.shape or not np.all(np.isfinite(values)):
            raise ValueError(f"symbol {self.name!r} is not finite on the grid")
        if np.max(values) > self.alpha + _BOUND_SLACK * max(1.0, abs(self.alpha)):
            raise ValueError(f"symbol {self.name!r} exceeds its bound alpha={self.alpha} on the grid")
        return values

    def with_eta(self, eta):
        spec = dict(self.spec, eta=eta)
        return DissipationSymbol(self.name, self.phi, self.alpha, eta, self.convention,
                                 self.supremum, self.even, spec)


def _scale(convention):
    return 1.0 if convention == "k" else 2.0 * math.pi


def builtin_symbol(name, eta, convention="k", gamma=None):
    """Named symbol from the equation family; ``kappa = k`` or ``2 pi k`` per convention."""
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    c = _scale(convention)
    spec = {"name": name, "eta": eta, "convention": convention}
    if name == "kdv_burgers":
        phi, sup = (lambda k: -(c * k) ** 2), 0.0
    elif name == "kdv_ks":
        phi, sup = (lambda k: (c * k) ** 2 - (c * k) ** 4), 0.25
    elif name == "ost":
        phi = lambda k: np.abs(c * k) - np.abs(c * k) ** 3
        # critical point of kappa - kappa^3 at kappa = 1/sqrt(3)
        kc = 1.0 / math.sqrt(3.0)
        sup = kc - kc ** 3
    elif name == "power":
        if gamma is None or gamma < 1:
            raise ValueError(f"power symbol needs gamma >= 1, got {gamma}")
        g = float(gamma)
        phi, sup = (lambda k: -np.abs(c * k) ** (2.0 * g)), 0.0
        spec["gamma"] = g
    elif name == "zero":
        phi, sup = (lambda k: np.zeros_like(k)), 0.0
    else:
        raise ValueError(f"unknown symbol {name!r}; expected one of {BUILTINS}")
    return DissipationSymbol(name, phi, max(1.0, sup), float(eta), convention, sup, True, spec)


def custom_symbol(table, eta, margin=0.0, name="custom"):
    """Symbol given by an explicit ``[[k, phi], ...]`` table.

    No interpolation: evaluating at a frequency absent from the table raises.
    ``alpha`` is the table maximum plus ``margin``, floored at 1.
    """
    pairs = np.asarray(table, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or len(pairs) == 0:
        raise ValueError("custom symbol table must be a non-empty list of [k, phi] pairs")
    if not np.all(np.isfinite(pairs)):
        raise ValueError("custom symbol table contains non-finite entries")
    order = np.argsort(pairs[:, 0])
    keys, vals = pairs[order, 0], pairs[order, 1]
    if np.any(np.diff(keys) <= 0):
        raise ValueError("custom symbol table lists a frequency twice")

    def phi(k):
        k = np.asarray(k, dtype=float)
        idx = np.clip(np.searchsorted(keys, k), 0, len(keys) - 1)
        left = np.clip(idx - 1, 0, len(keys) - 1)
        pick = np.where(np.abs(keys[left] - k) < np.abs(keys[idx] - k), left, idx)
        tol = 1e-9 * np.maximum(1.0, np.abs(k))
        missing = np.abs(keys[pick] - k) > tol
        if np.any(missing):
            raise KeyError(f"custom symbol has no entry for k={k[missing].ravel()[0]!r}")
        return vals[pick]

    sup = float(np.max(vals))
    spec = {"name": name, "eta": eta, "table": pairs.tolist(), "margin": margin}
    return DissipationSymbol(name, phi, max(1.0, sup + margin), float(eta), "k", sup, False, spec)


def symbol_from_spec(spec):
    """Build a symbol from a config mapping such as ``{"name": "ost", "eta": 0.5}``."""
    if not isinstance(spec, dict):
        raise ValueError("symbol spec must be a JSON object")
    if "name" not in spec:
        raise ValueError("symbol spec needs a 'name'")
    eta = spec.get("eta", 1.0)
    if "table" in spec:
        return custom_symbol(spec["table"], eta, spec.get("margin", 0.0), spec["name"])
    if spec["name"] == "custom":
        raise ValueError("custom symbol needs a 'table' listing every grid frequency")
    return builtin_symbol(spec["name"], eta, spec.get("convention", "k"), spec.get("gamma"))


def rescaled_symbol(sym, sigma):
    """Phi~(k) = sigma^-3 Phi(sigma k); its supremum shrinks by sigma^3."""
    base = sym.phi
    s3 = float(sigma) ** 3
    sup = sym.supremum / s3
    spec = {"rescaled_from": sym.spec, "sigma": float(sigma)}
    return DissipationSymbol(f"{sym.name}/sigma", lambda k: base(sigma * k) / s3,
                             max(1.0, sym.alpha / s3), sym.eta, sym.convention, sup, sym.even, spec)


def boundary_index(gamma):
    """Boundary Sobolev index s_gamma for the |d_x|^{2 gamma} dissipation."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    if gamma <= 1.5:
        return (3.0 - gamma) / (4.0 - 2.0 * gamma)
    return float(gamma)


def apply_dissipation(sym, field):
    """L f, i.e. coefficients multiplied by -Phi(k) (no eta factor)."""
    return field.with_coeffs(-sym.evaluate(field.grid) * field.coeffs)
