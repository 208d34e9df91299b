"""Kicked-rotor evolution of a single wave function and of the two-branch atom.

One period is free flight followed by a delta kick; no kick acts at t = 0.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_orders, truncation_order
from .grid import (AlignmentError, GridSpec, LeakageError, RotorParams,
                   WaveFunction, shift_array, shift_momentum, to_momentum,
                   to_position)

EVOLVE_LEAKAGE_TOL = 1e-6


class ReferenceKind(enum.Enum):
    SELF_INTERFERENCE = "self"
    HOLOGRAPHIC = "holo"


@dataclass(frozen=True)
class TwoBranchState:
    """Motional states of the two internal levels.

    ``upper`` belongs to level |1> (the kicked rotor), ``lower`` to the
    reference level |2>. Both are stored unit-norm; the branch weight 1/2
    enters only through the measured distributions.
    """
    upper: WaveFunction
    lower: WaveFunction

    def __post_init__(self):
        if self.upper.grid != self.lower.grid:
            raise ValueError("branches live on different grids")

    @property
    def grid(self) -> GridSpec:
        return self.upper.grid


def free_phase(grid: GridSpec, kbar: float, periods: int = 1) -> np.ndarray:
    return np.exp(-1j * periods * (kbar / 2.0) * grid.rho ** 2)


def free_propagate(phi: WaveFunction, kbar: float, periods: int = 1) -> WaveFunction:
    return phi.with_amps(phi.amps * free_phase(phi.grid, kbar, periods))


def kick(phi: WaveFunction, kick_strength: float, phase_offset: float = 0.0) -> WaveFunction:
    """Apply exp(-i kick_strength sin(xi + phase_offset)) in position space."""
    g = phi.grid
    xi = g.xi
    potential = np.sin(xi) * np.cos(phase_offset) + np.cos(xi) * np.sin(phase_offset)
    psi = to_position(phi) * np.exp(-1j * kick_strength * potential)
    return to_momentum(psi, g)


def _check_leakage(phi: WaveFunction, step: int):
    leak = phi.edge_mass()
    if leak > EVOLVE_LEAKAGE_TOL:
        raise LeakageError(
            f"edge mass {leak:.3g} after kick {step} exceeds "
            f"{EVOLVE_LEAKAGE_TOL:g}; enlarge rho_max")


def evolve_rotor(phi0: WaveFunction, params: RotorParams, num_kicks: int,
                 phase_offset: float = 0.0) -> list[WaveFunction]:
    """States immediately after kicks 1..num_kicks."""
    if num_kicks < 0:
        raise ValueError("num_kicks must be >= 0")
    out = []
    phi = phi0
    for n in range(1, num_kicks + 1):
        phi = kick(free_propagate(phi, params.kbar), params.kick_strength, phase_offset)
        _check_leakage(phi, n)
        out.append(phi)
    return out


def bessel_map_step(phi_prev: WaveFunction, params: RotorParams,
                    tol: float = 1e-14) -> WaveFunction:
    """One period via the Bessel expansion of the kick.

    phi_N(p) = sum_l J_l(-K/kbar) exp(-i beta(p - l)) phi_{N-1}(p - l),
    with beta(p) = kbar p^2 / 2 and the sum cut where |J_l| < tol.
    """
    g = phi_prev.grid
    s = g.num_points / (2.0 * g.rho_max)
    if abs(s - round(s)) > 1e-12:
        raise AlignmentError("p0 is not an integer number of bins")
    s = round(s)
    z = -params.kick_strength
    l_max = truncation_order(z, tol)
    coeffs = bessel_orders(z, l_max)
    free = phi_prev.amps * free_phase(g, params.kbar)
    out = np.zeros(g.num_points, dtype=complex)
    for l, c in zip(range(-l_max, l_max + 1), coeffs):
        if c != 0.0:
            out += c * shift_array(free, -l * s)
    return phi_prev.with_amps(out)


def evolve_bessel(phi0: WaveFunction, params: RotorParams, num_kicks: int,
                  tol: float = 1e-14) -> list[WaveFunction]:
    out = []
    phi = phi0
    for _ in range(num_kicks):
        phi = bessel_map_step(phi, params, tol)
        out.append(phi)
    return out


def evolve_pair(phi0: WaveFunction, params: RotorParams, kind: ReferenceKind,
                num_kicks: int) -> TwoBranchState:
    kind = ReferenceKind(kind)
    if num_kicks == 0:
        return TwoBranchState(phi0, phi0)
    upper = evolve_rotor(phi0, params, num_kicks)[-1]
    if kind is ReferenceKind.SELF_INTERFERENCE:
        lower = evolve_rotor(phi0, params, num_kicks, phase_offset=np.pi)[-1]
    else:
        lower = free_propagate(phi0, params.kbar, num_kicks)
    return TwoBranchState(upper, lower)


def readout_kick(state: TwoBranchState, shift_bins: int) -> TwoBranchState:
    """Shift the reference branch: lower(p) -> lower(p + P), P = shift_bins * drho."""
    return TwoBranchState(state.upper, shift_momentum(state.lower, shift_bins))
