import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kickrec.grid import (AlignmentError, GridMismatchError, LeakageError, RotorParams,
                          WaveFunction, gaussian_state, inner_product, make_grid,
                          shift_momentum, to_momentum, to_position)

from conftest import random_state


def test_make_grid_default():
    g = make_grid(4096, 64)
    assert g.drho == 1 / 32
    assert g.subdivisions_per_p0 == 32
    assert g.drho * g.num_points == 2 * g.rho_max
    # position window holds s periods of sin(xi)
    assert np.isclose(g.num_points * g.dxi, 2 * np.pi * 32)


def test_make_grid_small():
    g = make_grid(8, 2)
    assert g.drho == 0.5 and g.subdivisions_per_p0 == 2
    np.testing.assert_array_equal(g.rho, [-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5])


def test_make_grid_misaligned():
    with pytest.raises(AlignmentError):
        make_grid(4096, 63)


def test_make_grid_not_power_of_two():
    with pytest.raises(ValueError):
        make_grid(3000, 64)


def test_rotor_params():
    p = RotorParams(14, 15, 0.1)
    assert p.kick_strength == 14 / 15
    with pytest.raises(ValueError):
        RotorParams(14, -1, 0.1)
    with pytest.raises(ValueError):
        RotorParams(14, 15, 0)


def test_gaussian_normalized(grid, phi0):
    assert abs(phi0.norm2() - 1) < 1e-12
    assert np.all(phi0.amps.imag == 0) and np.all(phi0.amps.real >= 0)
    second = np.sum(grid.rho ** 2 * phi0.density) * grid.drho
    assert abs(second - 0.01) / 0.01 < 1e-3
    assert phi0.edge_mass() < 1e-8


@pytest.mark.parametrize("sigma", [0.01, 10.0])
def test_gaussian_rejects_bad_width(grid, sigma):
    with pytest.raises(ValueError):
        gaussian_state(grid, sigma)


def test_inner_product_basic(grid, phi0):
    assert abs(inner_product(phi0, phi0) - 1) < 1e-12
    assert abs(inner_product(phi0, 1j * phi0) - 1j) < 1e-12


def test_inner_product_shifted_gaussians(grid, phi0):
    # closed form for two sigma-Gaussian amplitudes a distance d apart: exp(-d^2 / (8 sigma^2))
    shifted = shift_momentum(phi0, grid.subdivisions_per_p0)
    assert abs(inner_product(phi0, shifted) - np.exp(-1 / (8 * 0.01))) < 1e-12


def test_inner_product_grid_mismatch(phi0):
    other = gaussian_state(make_grid(2048, 32), 0.1)
    with pytest.raises(GridMismatchError):
        inner_product(phi0, other)


def test_inner_product_conjugate_symmetry(grid):
    rng = np.random.default_rng(1)
    a, b = random_state(grid, rng), random_state(grid, rng)
    assert abs(inner_product(a, b) - np.conj(inner_product(b, a))) < 1e-15


def test_shift_identity_and_translation(grid, phi0):
    assert np.array_equal(shift_momentum(phi0, 0).amps, phi0.amps)
    s = grid.subdivisions_per_p0
    out = shift_momentum(phi0, s)
    # out(rho) = phi0(rho + 1) peaks at rho = -1
    assert grid.rho[np.argmax(out.density)] == -1.0
    assert abs(out.norm2() - 1) < 1e-12
    back = shift_momentum(out, -s)
    assert np.abs(back.amps - phi0.amps).max() < 1e-14


def test_shift_exact_bins(grid, phi0):
    k = 37
    out = shift_momentum(phi0, k)
    j = np.arange(grid.num_points - k)
    assert np.array_equal(out.amps[j], phi0.amps[j + k])


def test_shift_leakage(grid):
    edge = gaussian_state(grid, 0.1, center=-40.0)
    with pytest.raises(LeakageError):
        shift_momentum(edge, 31 * 32)


def test_delta_is_flat_in_position(grid):
    amps = np.zeros(grid.num_points, complex)
    amps[grid.zero_bin] = 1
    psi = to_position(WaveFunction(grid, amps).normalized())
    assert np.ptp(np.abs(psi)) < 1e-14


def test_round_trip_random(grid):
    rng = np.random.default_rng(2)
    phi = random_state(grid, rng)
    psi = to_position(phi)
    assert np.abs(to_momentum(psi, grid).amps - phi.amps).max() < 1e-13
    assert abs(np.sum(np.abs(psi) ** 2) * grid.dxi - phi.norm2()) < 1e-13


def test_gaussian_position_profile(grid, phi0):
    # continuous transform of exp(-rho^2/(4 s^2)) is 2 s sqrt(pi) exp(-s^2 xi^2), periodic in xi
    sigma = 0.1
    psi = to_position(phi0)
    xi = grid.xi
    period = grid.num_points * grid.dxi
    xi_c = (xi + period / 2) % period - period / 2
    norm = (2 * np.pi * sigma ** 2) ** -0.25
    expected = norm * 2 * sigma * np.sqrt(np.pi) / np.sqrt(2 * np.pi) * np.exp(-sigma ** 2 * xi_c ** 2)
    assert np.abs(np.abs(psi) - expected).max() < 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), width=st.floats(0.5, 8.0))
def test_parseval_property(seed, width):
    g = make_grid(1024, 16)
    phi = random_state(g, np.random.default_rng(seed), width=width)
    psi = to_position(phi)
    assert abs(np.sum(np.abs(psi) ** 2) * g.dxi - 1) < 1e-13
