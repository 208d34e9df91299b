"""Momentum grid, wave-function container and the momentum/position transform.

Units: hbar = k0 = m = T = 1, so momenta are measured in units of p0 = hbar*k0
and the position coordinate xi = k0*x makes the kick potential sin(xi).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EDGE_FRACTION = 0.02
LEAKAGE_TOL = 1e-8


class AlignmentError(ValueError):
    """Grid spacing is not an integer fraction of p0."""


class LeakageError(RuntimeError):
    """Significant probability reaches the edge of the momentum window."""


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    num_points: int
    rho_max: float

    def __post_init__(self):
        n = self.num_points
        if n < 2 or n & (n - 1):
            raise ValueError(f"num_points must be a power of two, got {n}")
        if self.rho_max <= 0:
            raise ValueError("rho_max must be positive")
        s = n / (2.0 * self.rho_max)
        if abs(s - round(s)) > 1e-12 * s or round(s) < 1:
            raise AlignmentError(
                f"1/drho = {s!r} is not a positive integer; shifts by p0 "
                "would not land on grid bins")

    @property
    def drho(self) -> float:
        return 2.0 * self.rho_max / self.num_points

    @property
    def subdivisions_per_p0(self) -> int:
        return round(self.num_points / (2.0 * self.rho_max))

    @property
    def rho(self) -> np.ndarray:
        return -self.rho_max + np.arange(self.num_points) * self.drho

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / (self.num_points * self.drho)

    @property
    def xi(self) -> np.ndarray:
        return np.arange(self.num_points) * self.dxi

    @property
    def zero_bin(self) -> int:
        return self.num_points // 2

    def bin_of(self, rho: float) -> int:
        """Index of the bin centred on momentum ``rho`` (must lie on the grid)."""
        j = (rho + self.rho_max) / self.drho
        if abs(j - round(j)) > 1e-9 or not 0 <= round(j) < self.num_points:
            raise ValueError(f"momentum {rho} is not a grid point")
        return int(round(j))

    def edge_bins(self) -> int:
        return max(1, int(np.ceil(EDGE_FRACTION * self.num_points)))


def make_grid(num_points: int = 4096, rho_max: float = 64.0) -> GridSpec:
    return GridSpec(int(num_points), float(rho_max))


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Momentum-space amplitudes ``amps[j] ~ phi(rho_j)`` on ``grid``.

    The norm is ``sum |amps|^2 * drho``.
    """
    grid: GridSpec
    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex)
        if a.shape != (self.grid.num_points,):
            raise ValueError(
                f"expected {self.grid.num_points} amplitudes, got {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "amps", a)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm2(self) -> float:
        return float(np.sum(self.density) * self.grid.drho)

    def edge_mass(self) -> float:
        e = self.grid.edge_bins()
        d = self.density
        return float((d[:e].sum() + d[-e:].sum()) * self.grid.drho)

    def normalized(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.amps / np.sqrt(self.norm2()))

    def with_amps(self, amps) -> "WaveFunction":
        return WaveFunction(self.grid, amps)

    def __mul__(self, c):
        return WaveFunction(self.grid, self.amps * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class RotorParams:
    """Dimensionless kicked-rotor parameters.

    K = k0^2 T kappa / m, kbar = k0^2 T hbar / m; the kick phase amplitude is
    kappa/hbar = K/kbar. ``sigma`` is the initial momentum width in p0.
    """
    K: float = 14.0
    kbar: float = 15.0
    sigma: float = 0.1

    def __post_init__(self):
        # K = 0 is allowed: it switches the kicks off.
        if self.K < 0 or self.kbar <= 0 or self.sigma <= 0:
            raise ValueError(
                f"need K >= 0, kbar > 0, sigma > 0 (got {self.K}, "
                f"{self.kbar}, {self.sigma})")

    @property
    def kick_strength(self) -> float:
        return self.K / self.kbar


def gaussian_state(grid: GridSpec, sigma: float, center: float = 0.0) -> WaveFunction:
    """Real Gaussian ``exp(-(rho-center)^2 / (4 sigma^2))``, so |phi|^2 has variance sigma^2."""
    if sigma < 2 * grid.drho:
        raise ValueError(
            f"sigma={sigma} is not resolved by drho={grid.drho} (need >= 2 drho)")
    if sigma > grid.rho_max / 10:
        raise ValueError(f"sigma={sigma} too wide for rho_max={grid.rho_max}")
    amps = np.exp(-((grid.rho - center) ** 2) / (4.0 * sigma ** 2))
    return WaveFunction(grid, amps).normalized()


def _check_same_grid(a: WaveFunction, b: WaveFunction):
    if a.grid != b.grid:
        raise GridMismatchError(f"{a.grid} != {b.grid}")


def inner_product(a: WaveFunction, b: WaveFunction) -> complex:
    """<a|b> = sum conj(a) b drho."""
    _check_same_grid(a, b)
    return complex(np.vdot(a.amps, b.amps) * a.grid.drho)


def shift_array(values: np.ndarray, shift_bins: int) -> np.ndarray:
    """``out[j] = values[j + shift_bins]`` with zero fill at the exposed edge."""
    n = len(values)
    out = np.zeros_like(values)
    if shift_bins >= n or shift_bins <= -n:
        return out
    if shift_bins >= 0:
        out[:n - shift_bins] = values[shift_bins:]
    else:
        out[-shift_bins:] = values[:n + shift_bins]
    return out


def shift_momentum(phi: WaveFunction, shift_bins: int) -> WaveFunction:
    """Apply exp(-i P x): the result is ``phi(rho + P)`` with ``P = shift_bins * drho``.

    A positive shift moves the distribution towards negative momenta.
    """
    grid = phi.grid
    shift_bins = int(shift_bins)
    if abs(shift_bins) * grid.drho >= grid.rho_max / 2:
        raise LeakageError(
            f"shift of {shift_bins} bins exceeds half the momentum window")
    d = phi.density
    if shift_bins > 0:
        lost = d[:shift_bins].sum()
    elif shift_bins < 0:
        lost = d[shift_bins:].sum()
    else:
        lost = 0.0
    if lost * grid.drho > LEAKAGE_TOL:
        raise LeakageError(
            f"shift of {shift_bins} bins pushes {lost * grid.drho:.3g} "
            "probability off the grid")
    return phi.with_amps(shift_array(phi.amps, shift_bins))


def _alternating_sign(n: int) -> np.ndarray:
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def to_position(phi: WaveFunction) -> np.ndarray:
    """Position amplitudes psi(xi_k), normalised so sum |psi|^2 dxi = sum |phi|^2 drho.

    psi(xi) approximates (2 pi)^(-1/2) * integral phi(rho) exp(i rho xi) drho.
    """
    g = phi.grid
    scale = np.sqrt(g.drho / g.dxi)
    return scale * _alternating_sign(g.num_points) * np.fft.ifft(phi.amps, norm="ortho")


def to_momentum(psi: np.ndarray, grid: GridSpec) -> WaveFunction:
    """Inverse of :func:`to_position`."""
    scale = np.sqrt(grid.dxi / grid.drho)
    return WaveFunction(
        grid, scale * np.fft.fft(_alternating_sign(grid.num_points) * psi, norm="ortho"))
