"""End-to-end simulation: evolve, measure (exact / Monte Carlo / noisy), reconstruct, score."""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .dynamics import ReferenceKind, TwoBranchState, evolve_pair
from .grid import GridSpec, RotorParams, WaveFunction, gaussian_state, make_grid
from .measurement import (Histogram, MeasuredSet, exact_measured_set, make_rng,
                          noisy_set, sampled_set)
from .reconstruct import (FidelityReport, OriginVanishes, ReconstructedState,
                          align_global_phase, fidelity, plan_peaks,
                          reconstruct_holographic, reconstruct_self_interference,
                          target_bins)

METHOD_CODES = {ReferenceKind.SELF_INTERFERENCE: 1, ReferenceKind.HOLOGRAPHIC: 2}
# setting index reserved for the unshifted reference measurement of the self method
ORIGIN_SETTING = 10 ** 7


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "exact"
    events: int = 0
    delta_w: float = 0.0

    @classmethod
    def from_config(cls, cfg: ExperimentConfig) -> "NoiseModel":
        return cls(cfg.noise, int(cfg.events), float(cfg.delta_w))


@dataclass
class RunResult:
    method: ReferenceKind
    num_kicks: int
    exact: WaveFunction
    rec: ReconstructedState
    report: FidelityReport
    shifts: list
    histograms: list = field(default_factory=list)
    budget: dict = field(default_factory=dict)


def setup(cfg: ExperimentConfig) -> tuple[GridSpec, RotorParams, WaveFunction]:
    grid = make_grid(cfg.num_points, cfg.rho_max)
    params = RotorParams(cfg.K, cfg.kbar, cfg.sigma)
    return grid, params, gaussian_state(grid, cfg.sigma)


def measure(exact: MeasuredSet, noise: NoiseModel, seed: tuple,
            histograms: list | None = None) -> MeasuredSet:
    if noise.kind == "exact":
        return exact
    rng = make_rng(*seed)
    if noise.kind == "events":
        mset, hists = sampled_set(exact, noise.events, rng, seed=list(seed))
        if histograms is not None:
            histograms.extend(hists)
        return mset
    return noisy_set(exact, noise.delta_w, rng, seed=list(seed))


class DiagonalSets(Mapping):
    """Self-interference measurements along P = -p, built on access.

    Each target bin has its own seed, so the result does not depend on the
    order in which bins are visited.
    """

    def __init__(self, state: TwoBranchState, targets, noise: NoiseModel, seed_prefix: tuple,
                 origin_offset_bins: int = 0):
        self.state = state
        self.targets = [int(j) for j in targets]
        self.noise = noise
        self.seed_prefix = tuple(seed_prefix)
        self.offset = int(origin_offset_bins)
        self._index = set(self.targets)

    def __getitem__(self, j):
        if j not in self._index:
            raise KeyError(j)
        shift = -(j - self.state.grid.zero_bin) + self.offset
        exact = exact_measured_set(self.state, shift)
        return measure(exact, self.noise, self.seed_prefix + (j,))

    def __iter__(self):
        return iter(self.targets)

    def __len__(self):
        return len(self.targets)


def run_reconstruction(cfg: ExperimentConfig, method, num_kicks: int, noise: NoiseModel,
                       realization: int = 0, keep_histograms: bool = False,
                       prepared=None) -> RunResult:
    """Simulate one measurement campaign and invert it.

    ``prepared`` may carry a precomputed (grid, params, phi0, state) tuple.
    """
    method = ReferenceKind(method)
    if prepared is None:
        grid, params, phi0 = setup(cfg)
        state = evolve_pair(phi0, params, method, num_kicks)
    else:
        grid, params, phi0, state = prepared
    exact_state = state.upper
    shifts = plan_peaks(exact_state.density, grid, cfg.epsilon_peak)
    s = grid.subdivisions_per_p0
    prefix = (cfg.master_seed, realization, METHOD_CODES[method])
    hists = [] if keep_histograms else None

    if method is ReferenceKind.HOLOGRAPHIC:
        sets = [measure(exact_measured_set(state, n * s), noise, prefix + (k,), hists)
                for k, n in enumerate(shifts)]
        rec = reconstruct_holographic(sets, phi0, params.kbar, num_kicks, cfg.tau_floor)
        budget = {"measured_sets": len(sets), "distributions": 4 * len(sets)}
    else:
        targets = target_bins(phi0, shifts, cfg.tau_floor)
        origin = measure(exact_measured_set(state, 0), noise, prefix + (ORIGIN_SETTING,), hists)
        w0 = float(origin.w_lower[grid.zero_bin])
        try:
            rec = reconstruct_self_interference(
                DiagonalSets(state, targets, noise, prefix), w0)
        except OriginVanishes as exc:
            best = int(np.argmax(origin.w_lower))
            raise OriginVanishes(exc.value, exc.floor, suggestion=float(grid.rho[best])) from None
        ref0 = state.lower.amps[grid.zero_bin]
        rec.meta["reference_phase_at_origin"] = float(np.angle(ref0))
        budget = {"measured_sets": len(targets) + 1, "distributions": 4 * (len(targets) + 1)}
    if noise.kind == "events":
        budget["events_per_distribution"] = noise.events
        budget["total_events"] = noise.events * budget["distributions"]
    rec.meta.update(num_kicks=num_kicks, realization=realization,
                    seed_prefix=list(prefix), noise=noise.kind)
    report = fidelity(rec, exact_state)
    return RunResult(method, num_kicks, exact_state, rec, report, shifts,
                     hists or [], budget)


def aligned_normalized(rec: ReconstructedState, exact: WaveFunction) -> np.ndarray:
    wf = rec.as_wavefunction()
    norm_rec = ReconstructedState(rec.grid, wf.amps, rec.valid_mask, rec.method, rec.meta)
    return align_global_phase(norm_rec, exact).amps


def sweep_task(args):
    """One (method, delta_w, realization) fidelity for the accuracy sweep."""
    cfg, method, num_kicks, delta_w, realization, prepared = args
    noise = NoiseModel("delta_w", 0, delta_w) if delta_w > 0 else NoiseModel("exact")
    res = run_reconstruction(cfg, method, num_kicks, noise, realization, prepared=prepared)
    return res.report.fidelity


def sweep_statistics(fids) -> tuple[float, float, float]:
    """Mean, sample standard deviation and standard error of the mean."""
    f = np.asarray(fids, dtype=float)
    std = float(f.std(ddof=1)) if len(f) > 1 else 0.0
    return float(f.mean()), std, std / np.sqrt(len(f))
