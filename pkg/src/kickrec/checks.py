"""Numerical invariants of the propagators and measurement formulas."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j
from .dynamics import (ReferenceKind, evolve_bessel, evolve_pair, evolve_rotor,
                       free_propagate, kick)
from .grid import (AlignmentError, RotorParams, WaveFunction, gaussian_state,
                   make_grid, to_momentum, to_position)
from .measurement import branch_distributions, theta_distribution
from .dynamics import readout_kick


@dataclass
class CheckResult:
    name: str
    error: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<28s} error={self.error:.3e}  tol={self.tolerance:.1e}{extra}"


def l2_distance(a: WaveFunction, b: WaveFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(a.amps - b.amps) ** 2) * a.grid.drho))


def reflect(amps: np.ndarray) -> np.ndarray:
    """a(rho) -> a(-rho) on the grid rho_j = -rho_max + j drho."""
    n = len(amps)
    return amps[(-np.arange(n)) % n]


def check_oracle(params, phi0, num_kicks=5) -> CheckResult:
    t = time.perf_counter()
    split = evolve_rotor(phi0, params, num_kicks)
    bessel = evolve_bessel(phi0, params, num_kicks)
    err = max(l2_distance(a, b) for a, b in zip(split, bessel)) if num_kicks else 0.0
    return CheckResult("split-step vs Bessel map", err, 1e-8, time.perf_counter() - t,
                       f"N={num_kicks}")


def check_unitarity(params, phi0, num_kicks=9) -> CheckResult:
    drift = 0.0
    phi = phi0
    for _ in range(num_kicks):
        nxt = kick(free_propagate(phi, params.kbar), params.kick_strength)
        drift = max(drift, abs(nxt.norm2() - phi.norm2()))
        phi = nxt
    return CheckResult("norm drift per kick", drift, 1e-12)


def check_transform(grid, samples=1000, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    err = 0.0
    for _ in range(samples):
        a = rng.standard_normal(grid.num_points) + 1j * rng.standard_normal(grid.num_points)
        phi = WaveFunction(grid, a).normalized()
        psi = to_position(phi)
        back = to_momentum(psi, grid)
        err = max(err, np.abs(back.amps - phi.amps).max(),
                  abs(np.sum(np.abs(psi) ** 2) * grid.dxi - 1.0))
    return CheckResult("transform round trip", float(err), 1e-13, detail=f"{samples} states")


def check_theta_sum(params, phi0, num_kicks=3) -> CheckResult:
    err = 0.0
    s = phi0.grid.subdivisions_per_p0
    for kind in ReferenceKind:
        state = evolve_pair(phi0, params, kind, num_kicks)
        for shift in (0, s, -2 * s, 7):
            st = readout_kick(state, shift)
            w_up, w_lo = branch_distributions(st)
            for theta in (0.0, 0.3, np.pi / 2):
                lhs = theta_distribution(st, theta) + theta_distribution(st, theta + np.pi)
                err = max(err, np.abs(lhs - (w_up + w_lo)).max())
    return CheckResult("theta-sum identity", float(err), 1e-14)


def check_parity(params, phi0, num_kicks=3) -> CheckResult:
    state = evolve_pair(phi0, params, ReferenceKind.SELF_INTERFERENCE, num_kicks)
    err = np.abs(state.lower.amps - reflect(state.upper.amps)).max()
    return CheckResult("parity duality", float(err), 1e-12, detail=f"N={num_kicks}")


def check_resonance(kick_strength, num_kicks=3, grid=None) -> CheckResult:
    """At kbar = 4 pi, N kicks on an integer-momentum state compose into one kick of N times the strength."""
    grid = grid or make_grid()
    amps = np.zeros(grid.num_points, dtype=complex)
    amps[grid.zero_bin] = 1.0
    start = WaveFunction(grid, amps).normalized()
    params = RotorParams(K=kick_strength * 4 * np.pi, kbar=4 * np.pi, sigma=1.0)
    many = evolve_rotor(start, params, num_kicks)[-1]
    single = kick(start, num_kicks * kick_strength)
    integer_bins = np.arange(grid.num_points) % grid.subdivisions_per_p0 == grid.zero_bin % grid.subdivisions_per_p0
    err = np.abs(many.density - single.density)[integer_bins].max() * grid.drho
    return CheckResult("quantum resonance", float(err), 1e-10, detail=f"N={num_kicks}")


def check_sidebands(kick_strength, sigma=0.02) -> CheckResult:
    grid = make_grid(4096, 8)
    phi = kick(gaussian_state(grid, sigma), kick_strength)
    cells = np.floor(grid.rho + 0.5).astype(int)
    err = 0.0
    for l in range(-3, 4):
        pop = phi.density[cells == l].sum() * grid.drho
        expected = bessel_j(l, kick_strength) ** 2
        if expected > 1e-3:
            err = max(err, abs(pop - expected) / expected)
    return CheckResult("kick sidebands J_l^2", float(err), 1e-2, detail=f"sigma={sigma}")


def check_alignment(num_points, rho_max) -> CheckResult:
    try:
        make_grid(num_points, rho_max)
    except AlignmentError as exc:
        return CheckResult("grid alignment", np.inf, 0.0, detail=str(exc))
    return CheckResult("grid alignment", 0.0, 0.0)


def run_all(cfg) -> list[CheckResult]:
    align = check_alignment(cfg.num_points, cfg.rho_max)
    if not align.passed:
        return [align]
    grid = make_grid(cfg.num_points, cfg.rho_max)
    params = RotorParams(cfg.K, cfg.kbar, cfg.sigma)
    phi0 = gaussian_state(grid, cfg.sigma)
    return [
        align,
        check_oracle(params, phi0, 5),
        check_unitarity(params, phi0),
        check_transform(grid),
        check_theta_sum(params, phi0),
        check_parity(params, phi0),
        check_resonance(params.kick_strength, 3, grid),
        check_sidebands(params.kick_strength),
    ]
