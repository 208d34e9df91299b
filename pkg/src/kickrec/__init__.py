"""Kicked-rotor simulation and interferometric reconstruction of its momentum wave function."""

__version__ = "0.1.0"

from .grid import (GridSpec, RotorParams, WaveFunction, gaussian_state, inner_product,
                   make_grid, shift_momentum, to_momentum, to_position)
from .dynamics import (ReferenceKind, TwoBranchState, bessel_map_step, evolve_pair,
                       evolve_rotor, free_propagate, kick, readout_kick)
from .bessel import bessel_j
from .measurement import (MeasuredSet, apply_relative_noise, branch_distributions,
                          exact_measured_set, sample_histogram, theta_distribution)
from .reconstruct import (align_global_phase, fidelity, interference_term, plan_peaks,
                          reconstruct_holographic, reconstruct_self_interference)
