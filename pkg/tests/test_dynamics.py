import numpy as np
import pytest

from kickrec.bessel import bessel_j
from kickrec.checks import l2_distance, reflect
from kickrec.dynamics import (ReferenceKind, TwoBranchState, bessel_map_step, evolve_bessel,
                              evolve_pair, evolve_rotor, free_propagate, kick, readout_kick)
from kickrec.grid import (AlignmentError, GridSpec, LeakageError, RotorParams, WaveFunction,
                          gaussian_state, make_grid)

from conftest import random_state


def test_free_phase_value(grid, phi0):
    out = free_propagate(phi0, 15.0, 1)
    j = grid.bin_of(1.0)
    assert out.amps[j] / phi0.amps[j] == pytest.approx(np.exp(-7.5j), abs=1e-15)
    assert np.abs(np.abs(out.amps) - np.abs(phi0.amps)).max() < 1e-15


def test_free_phase_resonance(grid):
    ones = WaveFunction(grid, np.ones(grid.num_points))
    out = free_propagate(ones, 4 * np.pi)
    integer = np.abs(grid.rho - np.round(grid.rho)) == 0
    assert np.abs(out.amps[integer] - 1).max() < 1e-10


def test_kick_zero_is_identity(phi0):
    assert np.abs(kick(phi0, 0.0).amps - phi0.amps).max() < 1e-14


def test_kick_offset_pi(grid):
    phi = random_state(grid, np.random.default_rng(3))
    a = kick(phi, 0.9, np.pi)
    b = kick(phi, -0.9, 0.0)
    assert np.abs(a.amps - b.amps).max() < 1e-14


def test_kick_unitary(grid):
    phi = random_state(grid, np.random.default_rng(4))
    assert abs(kick(phi, 14 / 15).norm2() - 1) < 1e-12


def test_kick_sidebands():
    # narrow peak at 0: sideband l population -> J_l(kappa)^2
    g = make_grid(4096, 8)
    z = 14 / 15
    out = kick(gaussian_state(g, 0.02), z)
    cells = np.floor(g.rho + 0.5).astype(int)
    pops = {l: out.density[cells == l].sum() * g.drho for l in range(-2, 3)}
    assert pops[0] == pytest.approx(0.630, abs=1e-3)
    assert pops[1] == pytest.approx(0.174, abs=1e-3)
    for l in range(-2, 3):
        assert pops[l] == pytest.approx(bessel_j(l, z) ** 2, rel=1e-2)


def test_evolve_zero_kicks(phi0, params):
    assert evolve_rotor(phi0, params, 0) == []


def test_evolve_norm(phi0, params):
    prev = phi0.norm2()
    for phi in evolve_rotor(phi0, params, 9):
        assert abs(phi.norm2() - prev) < 1e-12
        prev = phi.norm2()


def test_evolve_leakage_abort():
    g = make_grid(256, 4)
    phi = gaussian_state(g, 0.2)
    with pytest.raises(LeakageError):
        evolve_rotor(phi, RotorParams(K=60, kbar=1, sigma=0.2), 3)


def test_oracle_equivalence(phi0, params):
    split = evolve_rotor(phi0, params, 5)
    bessel = evolve_bessel(phi0, params, 5)
    for a, b in zip(split, bessel):
        assert l2_distance(a, b) <= 1e-8


def test_bessel_step_one(phi0, params):
    a = bessel_map_step(phi0, params, 1e-14)
    b = evolve_rotor(phi0, params, 1)[0]
    assert np.abs(a.amps - b.amps).max() < 1e-10
    assert abs(a.norm2() - 1) < 1e-10


def test_bessel_step_no_kick(phi0):
    p = RotorParams(K=0.0, kbar=15.0, sigma=0.1)
    a = bessel_map_step(phi0, p)
    assert np.abs(a.amps - free_propagate(phi0, 15.0).amps).max() < 1e-15


def test_bessel_step_alignment():
    # a grid object whose p0 is not a whole number of bins
    g = object.__new__(GridSpec)
    object.__setattr__(g, "num_points", 64)
    object.__setattr__(g, "rho_max", 5.0)
    phi = WaveFunction(g, np.exp(-g.rho ** 2))
    with pytest.raises(AlignmentError):
        bessel_map_step(phi, RotorParams())


def test_resonance_composition():
    g = make_grid(4096, 64)
    amps = np.zeros(g.num_points, complex)
    amps[g.zero_bin] = 1
    start = WaveFunction(g, amps).normalized()
    z = 14 / 15
    p = RotorParams(K=z * 4 * np.pi, kbar=4 * np.pi, sigma=1.0)
    after = evolve_rotor(start, p, 3)[-1]
    probs = after.density * g.drho
    for l in range(-6, 7):
        # brute force: N kicks compose to J_l(N kappa)
        assert probs[g.bin_of(l)] == pytest.approx(bessel_j(l, 3 * z) ** 2, abs=1e-10)
    single = kick(start, 3 * z)
    assert np.abs(after.density - single.density).max() * g.drho < 1e-10


def test_pair_zero_kicks(phi0, params):
    for kind in ReferenceKind:
        st = evolve_pair(phi0, params, kind, 0)
        assert np.array_equal(st.upper.amps, phi0.amps)
        assert np.array_equal(st.lower.amps, phi0.amps)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_pair_holographic_reference(phi0, params, n):
    st = evolve_pair(phi0, params, ReferenceKind.HOLOGRAPHIC, n)
    assert np.abs(np.abs(st.lower.amps) - np.abs(phi0.amps)).max() < 1e-14
    assert np.abs(st.upper.amps - evolve_rotor(phi0, params, n)[-1].amps).max() == 0


def test_pair_parity(phi0, params):
    st = evolve_pair(phi0, params, ReferenceKind.SELF_INTERFERENCE, 3)
    assert np.abs(st.lower.amps - reflect(st.upper.amps)).max() < 1e-12


def test_pair_mismatched_grids(phi0):
    other = gaussian_state(make_grid(2048, 32), 0.1)
    with pytest.raises(ValueError):
        TwoBranchState(phi0, other)


def test_readout_kick(grid, phi0, params):
    st = evolve_pair(phi0, params, ReferenceKind.HOLOGRAPHIC, 2)
    same = readout_kick(st, 0)
    assert np.array_equal(same.lower.amps, st.lower.amps)
    n = 3
    out = readout_kick(st, n * grid.subdivisions_per_p0)
    assert out.upper is st.upper
    mean = np.sum(grid.rho * out.lower.density) * grid.drho
    assert mean == pytest.approx(-n, abs=1e-12)
