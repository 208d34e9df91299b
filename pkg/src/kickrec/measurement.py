"""Measured momentum distributions: exact values, Monte-Carlo histograms and noise."""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import TwoBranchState, readout_kick
from .grid import GridMismatchError, GridSpec


class Provenance(enum.Enum):
    EXACT = "exact"
    SAMPLED = "sampled"
    NOISY = "noisy"


def make_rng(*seed_parts: int) -> np.random.Generator:
    """PCG64 generator seeded from the tuple (master_seed, realization, setting, ...)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(s) for s in seed_parts])))


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (tuple, list)):
        return make_rng(*seed)
    return make_rng(seed)


def branch_distributions(state: TwoBranchState) -> tuple[np.ndarray, np.ndarray]:
    """W_N = |upper|^2/2 and the reference distribution |lower|^2/2."""
    return state.upper.density / 2.0, state.lower.density / 2.0


def theta_distribution(state: TwoBranchState, theta: float, shift_bins: int | None = None) -> np.ndarray:
    """Probability density to find the atom in (|1> + e^{-i theta}|2>)/sqrt(2) with momentum p.

    ``state`` must already carry the readout shift on its lower branch unless
    ``shift_bins`` is given, in which case the shift is applied here.
    """
    if shift_bins is not None:
        state = readout_kick(state, shift_bins)
    up = state.upper.amps
    lo = state.lower.amps
    w = 0.5 * (np.abs(up) ** 2 / 2 + np.abs(lo) ** 2 / 2
               + np.real(up * np.conj(lo) * np.exp(-1j * theta)))
    return np.maximum(w, 0.0)


@dataclass(frozen=True, eq=False)
class MeasuredSet:
    """The four distributions needed to form the interference term at one readout shift.

    ``w_upper[j]`` is W_N(rho_j), ``w_lower[j]`` the shifted reference
    distribution W_ref(rho_j + P); ``w_theta0`` and ``w_theta90`` are the
    projections at theta = 0 and pi/2.
    """
    grid: GridSpec
    shift_bins: int
    w_upper: np.ndarray
    w_lower: np.ndarray
    w_theta0: np.ndarray
    w_theta90: np.ndarray
    provenance: Provenance = Provenance.EXACT
    meta: dict = field(default_factory=dict)

    def arrays(self):
        return self.w_upper, self.w_lower, self.w_theta0, self.w_theta90


def exact_measured_set(state: TwoBranchState, shift_bins: int) -> MeasuredSet:
    shifted = readout_kick(state, shift_bins)
    w_up, w_lo = branch_distributions(shifted)
    return MeasuredSet(
        grid=state.grid,
        shift_bins=int(shift_bins),
        w_upper=w_up,
        w_lower=w_lo,
        w_theta0=theta_distribution(shifted, 0.0),
        w_theta90=theta_distribution(shifted, np.pi / 2),
        provenance=Provenance.EXACT,
    )


@dataclass(frozen=True, eq=False)
class Histogram:
    grid: GridSpec
    counts: np.ndarray
    total_atoms: int
    meta: dict = field(default_factory=dict)

    def estimate(self) -> np.ndarray:
        """Density estimate; E[estimate] equals the sampled density."""
        return self.counts / (self.total_atoms * self.grid.drho)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in ("theta", "shift_bins", "M", "seed"):
            if key in self.meta:
                buf.write(f"# {key}={self.meta[key]}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rho_bin_center", "counts", "density_estimate"])
        for rho, c, d in zip(self.grid.rho, self.counts, self.estimate()):
            w.writerow([repr(float(rho)), int(c), repr(float(d))])
        return buf.getvalue()


def sample_histogram(density: np.ndarray, grid: GridSpec, num_events: int,
                     seed, meta: dict | None = None) -> Histogram:
    """Detect ``num_events`` atoms drawn from ``density``.

    Each atom lands in the projected internal state with probability equal to
    the total mass of ``density``; detected atoms get a momentum bin drawn from
    the normalised density.
    """
    rng = as_rng(seed)
    density = np.asarray(density, dtype=float)
    if np.any(density < 0):
        raise ValueError("density has negative entries")
    probs = density * grid.drho
    mass = probs.sum()
    if mass > 1 + 1e-9:
        raise ValueError(f"density integrates to {mass} > 1")
    if mass == 0:
        counts = np.zeros(len(density), dtype=np.int64)
    else:
        detected = rng.binomial(num_events, min(mass, 1.0))
        counts = rng.multinomial(detected, probs / mass)
    return Histogram(grid, counts, int(num_events), dict(meta or {}, M=int(num_events)))


def apply_relative_noise(density: np.ndarray, delta_w: float, seed) -> np.ndarray:
    """Multiplicative Gaussian noise of relative size ``delta_w``, clamped at zero."""
    if delta_w < 0:
        raise ValueError("delta_w must be >= 0")
    density = np.asarray(density, dtype=float)
    if delta_w == 0:
        return density
    rng = as_rng(seed)
    return np.maximum(0.0, density * (1.0 + delta_w * rng.standard_normal(density.shape)))


def sampled_set(exact: MeasuredSet, num_events: int, rng: np.random.Generator,
                seed=None) -> tuple[MeasuredSet, list[Histogram]]:
    """Replace each distribution of ``exact`` by a histogram estimate from ``num_events`` atoms."""
    labels = (("upper", None), ("lower", None), ("theta0", 0.0), ("theta90", np.pi / 2))
    hists = []
    for (name, theta), dens in zip(labels, exact.arrays()):
        meta = {"distribution": name, "shift_bins": exact.shift_bins, "seed": seed}
        if theta is not None:
            meta["theta"] = theta
        hists.append(sample_histogram(dens, exact.grid, num_events, rng, meta))
    est = [h.estimate() for h in hists]
    return replace(exact, w_upper=est[0], w_lower=est[1], w_theta0=est[2], w_theta90=est[3],
                   provenance=Provenance.SAMPLED,
                   meta=dict(exact.meta, events=int(num_events), seed=seed)), hists


def noisy_set(exact: MeasuredSet, delta_w: float, rng: np.random.Generator, seed=None) -> MeasuredSet:
    """Independent relative noise on all four distributions."""
    noisy = [apply_relative_noise(d, delta_w, rng) for d in exact.arrays()]
    return replace(exact, w_upper=noisy[0], w_lower=noisy[1], w_theta0=noisy[2], w_theta90=noisy[3],
                   provenance=Provenance.NOISY if delta_w > 0 else exact.provenance,
                   meta=dict(exact.meta, delta_w=float(delta_w), seed=seed))


def check_same_grid(a: GridSpec, b: GridSpec):
    if a != b:
        raise GridMismatchError(f"{a} != {b}")
