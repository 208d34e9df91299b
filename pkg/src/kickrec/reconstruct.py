"""Inversion of measured distributions into the kicked-rotor momentum wave function."""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .dynamics import ReferenceKind, free_phase
from .grid import GridMismatchError, GridSpec, WaveFunction, shift_array
from .measurement import MeasuredSet, Provenance


PER_PEAK_MIN_MASS = 1e-12


class OriginVanishes(ValueError):
    """The reference density at the anchor momentum is too small to divide by."""

    def __init__(self, value, floor, suggestion=None):
        self.value = value
        self.floor = floor
        self.suggestion = suggestion
        msg = (f"reference density at the anchor momentum is {value:.3g} <= floor "
               f"{floor:.3g}; use another readout offset P = -p + p_off")
        if suggestion is not None:
            msg += f" (e.g. p_off = {suggestion:g})"
        super().__init__(msg)


class DivisionFloor(ValueError):
    """No bin of a holographic reconstruction clears the reference-amplitude floor."""


@dataclass(frozen=True, eq=False)
class InterferenceTerm:
    shift_bins: int
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class ReconstructedState:
    grid: GridSpec
    amps: np.ndarray
    valid_mask: np.ndarray
    method: ReferenceKind
    meta: dict = field(default_factory=dict)

    def as_wavefunction(self) -> WaveFunction:
        """Estimate normalised over its valid bins (zero elsewhere)."""
        wf = WaveFunction(self.grid, np.where(self.valid_mask, self.amps, 0))
        if wf.norm2() == 0:
            raise ValueError("reconstruction is empty")
        return wf.normalized()


@dataclass
class FidelityReport:
    fidelity: float
    global_phase: float
    per_peak: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"fidelity": self.fidelity, "global_phase": self.global_phase,
                "per_peak": self.per_peak}


def interference_term(mset: MeasuredSet) -> InterferenceTerm:
    """2 W0 + 2i W90 - (1+i)(W + W_ref); equals phi_N(p) conj(ref_N(p+P)) for exact data."""
    w_sum = mset.w_upper + mset.w_lower
    values = 2 * mset.w_theta0 + 2j * mset.w_theta90 - (1 + 1j) * w_sum
    return InterferenceTerm(mset.shift_bins, values)


def coverage_mask(phi0: WaveFunction, shift_bins: int, tau: float) -> np.ndarray:
    """Bins where the shifted initial amplitude |phi0(p+P)| >= tau * max|phi0|."""
    ref = np.abs(shift_array(phi0.amps, shift_bins))
    return ref >= tau * np.abs(phi0.amps).max()


def target_bins(phi0: WaveFunction, shifts: Sequence[int], tau: float) -> np.ndarray:
    """Indices covered by the reference at any of the integer shifts ``shifts`` (in p0)."""
    s = phi0.grid.subdivisions_per_p0
    mask = np.zeros(phi0.grid.num_points, dtype=bool)
    for n in shifts:
        mask |= coverage_mask(phi0, n * s, tau)
    return np.flatnonzero(mask)


def reconstruct_self_interference(diagonal_sets: Mapping[int, MeasuredSet], w_ref_origin: float,
                                  origin_offset_bins: int = 0,
                                  floor: float = 1e-10) -> ReconstructedState:
    """Read the interference term along the diagonal P = -p (+ p_off).

    ``diagonal_sets`` maps a target bin index j to the set measured with
    ``shift_bins = -(j - zero_bin) + origin_offset_bins``; ``w_ref_origin`` is
    the reference density at p_off (zero unless an offset is used). The result
    carries the unobservable phase of the reference amplitude at p_off.
    """
    if not w_ref_origin > floor:
        raise OriginVanishes(w_ref_origin, floor)
    sets = dict(diagonal_sets.items()) if not isinstance(diagonal_sets, dict) else diagonal_sets
    grid = None
    n = None
    amps = None
    mask = None
    scale = 1.0 / np.sqrt(2.0 * w_ref_origin)
    for j, mset in sets.items():
        if grid is None:
            grid = mset.grid
            n = grid.num_points
            amps = np.zeros(n, dtype=complex)
            mask = np.zeros(n, dtype=bool)
        elif mset.grid != grid:
            raise GridMismatchError("diagonal sets live on different grids")
        expected = -(j - grid.zero_bin) + origin_offset_bins
        if mset.shift_bins != expected:
            raise ValueError(f"set for bin {j} has shift {mset.shift_bins}, expected {expected}")
        m = (2 * mset.w_theta0[j] + 2j * mset.w_theta90[j]
             - (1 + 1j) * (mset.w_upper[j] + mset.w_lower[j]))
        amps[j] = m * scale
        mask[j] = True
    if grid is None:
        raise ValueError("no diagonal sets given")
    provenance = {s.provenance.value for s in sets.values()}
    return ReconstructedState(grid, amps, mask, ReferenceKind.SELF_INTERFERENCE, {
        "num_sets": len(sets), "w_ref_origin": float(w_ref_origin),
        "origin_offset_bins": int(origin_offset_bins),
        "provenance": sorted(provenance),
        "phase_convention": "reference amplitude at p_off taken real positive",
    })


def reconstruct_holographic(sets: Sequence[MeasuredSet], phi0: WaveFunction, kbar: float,
                            num_kicks: int, tau: float = 1e-3) -> ReconstructedState:
    """Divide the interference term by the known, freely evolved reference.

    For a set at shift P the estimate is
    exp(-i N kbar (p+P)^2 / 2) * M(p; P) / conj(phi0(p+P)), kept only where
    |phi0(p+P)| >= tau * max|phi0|. Where shifts overlap, the one with the
    larger reference amplitude wins (ties go to the smaller |P|).
    """
    grid = phi0.grid
    amps = np.zeros(grid.num_points, dtype=complex)
    best = np.zeros(grid.num_points)
    chosen = np.full(grid.num_points, np.iinfo(np.int64).min, dtype=np.int64)
    floor = tau * np.abs(phi0.amps).max()
    for mset in sorted(sets, key=lambda m: (abs(m.shift_bins), -m.shift_bins)):
        if mset.grid != grid:
            raise GridMismatchError("measured set and initial state use different grids")
        ref = shift_array(phi0.amps, mset.shift_bins)
        # |phi0(p+P)| exp(-i N beta(p+P)) is the reference amplitude after free flight
        ref_phase = shift_array(free_phase(grid, kbar, num_kicks), mset.shift_bins)
        mag = np.abs(ref)
        take = (mag >= floor) & (mag > best)
        if not take.any():
            continue
        m = interference_term(mset).values
        amps[take] = ref_phase[take] * m[take] / np.conj(ref[take])
        best[take] = mag[take]
        chosen[take] = mset.shift_bins
    mask = best > 0
    if not mask.any():
        raise DivisionFloor(f"no bin has reference amplitude above tau={tau:g} of the maximum")
    s = grid.subdivisions_per_p0
    return ReconstructedState(grid, amps, mask, ReferenceKind.HOLOGRAPHIC, {
        "num_sets": len(sets),
        "shifts_p0": sorted({m.shift_bins / s for m in sets}),
        "tau": tau,
        "min_reference_ratio": float(best[mask].min() / np.abs(phi0.amps).max()),
        "provenance": sorted({m.provenance.value for m in sets}),
        "chosen_shift_bins": chosen,
    })


def plan_peaks(density: np.ndarray, grid: GridSpec, epsilon_peak: float = 1e-12) -> list[int]:
    """Integer shifts n = -m for every unit cell around rho = m holding > epsilon_peak of the mass.

    Sorted by descending mass; near-equal masses go to the smaller |n|, then positive n.
    """
    density = np.asarray(density, dtype=float)
    if np.any(density < 0):
        raise ValueError("density has negative entries")
    cells = np.floor(grid.rho + 0.5).astype(int)
    total = density.sum()
    if total == 0:
        return []
    masses = {}
    for m in np.unique(cells):
        masses[int(m)] = density[cells == m].sum() / total
    picked = [(-m, w) for m, w in masses.items() if w > epsilon_peak]
    picked.sort(key=lambda t: (-round(t[1], 12), abs(t[0]), -t[0]))
    return [n for n, _ in picked]


def align_global_phase(rec: ReconstructedState, reference: WaveFunction) -> ReconstructedState:
    """Rotate ``rec`` by the phase that makes its overlap with ``reference`` real positive."""
    if rec.grid != reference.grid:
        raise GridMismatchError("grids differ")
    overlap = np.vdot(np.where(rec.valid_mask, rec.amps, 0), reference.amps)
    if abs(overlap) == 0:
        raise ValueError("zero overlap; global phase undefined")
    rot = overlap / abs(overlap)
    return ReconstructedState(rec.grid, rec.amps * rot, rec.valid_mask, rec.method,
                              dict(rec.meta, aligned_phase=float(np.angle(rot))))


def fidelity(rec: ReconstructedState, exact: WaveFunction) -> FidelityReport:
    """|<rec|exact>|^2 with ``rec`` normalised over its valid bins and ``exact`` untouched.

    The per-peak entries compare both states restricted to one unit cell of
    the valid region, each renormalised there.
    """
    if rec.grid != exact.grid:
        raise GridMismatchError("grids differ")
    if not rec.valid_mask.any():
        raise ValueError("reconstruction has an empty valid mask")
    r = np.where(rec.valid_mask, rec.amps, 0)
    nr = np.sqrt(np.sum(np.abs(r) ** 2))
    if nr == 0:
        return FidelityReport(0.0, 0.0, [])
    r = r / nr
    e = exact.amps / np.sqrt(np.sum(np.abs(exact.amps) ** 2))
    overlap = np.vdot(r, e)
    f = float(min(1.0, abs(overlap) ** 2))

    per_peak = []
    cells = np.floor(rec.grid.rho + 0.5).astype(int)
    dens_e = np.abs(e) ** 2
    for m in np.unique(cells[rec.valid_mask]):
        mass = float(dens_e[cells == m].sum())
        if mass < PER_PEAK_MIN_MASS:
            continue
        sel = rec.valid_mask & (cells == m)
        rr, ee = r[sel], e[sel]
        na, nb = np.linalg.norm(rr), np.linalg.norm(ee)
        cell_f = 0.0 if na == 0 else float(abs(np.vdot(rr / na, ee / nb)) ** 2)
        per_peak.append({"cell": int(m), "mass": mass, "fidelity": min(1.0, cell_f)})
    return FidelityReport(f, float(np.angle(overlap)), per_peak)
