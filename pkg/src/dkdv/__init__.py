"""Spectral solver and estimate harness for dissipative perturbations of periodic KdV."""
__version__ = "0.1.0"

from .spectral import (PeriodicGrid, SpectralField, HermitianSymmetryError, forward_transform,
                       inverse_transform, sobolev_norm, l2_norm, from_modes, random_field,
                       project_mean_zero, spectral_derivative)
from .symbols import DissipationSymbol, builtin_symbol, custom_symbol, symbol_from_spec, rescaled_symbol
from .propagator import PropagatorTable, evolve_linear, group_multiplier, duhamel, duhamel_all, i_a_operator
from .solver import BlowUpError, SolverConfig, Trajectory, simulate, step
from .bourgain import SpaceTimeField, NormSpec, ysb_norm, ys_norm, zs_norm, psi, psi_T
from .picard import PicardConfig, PicardReport, picard_iterate
from .rescaling import RescaleResult, rescale, choose_sigma
from .snapshot import SnapshotFormatError, save_snapshot, load_snapshot
from .estimates import EstimateReport, ESTIMATES
