"""Maxwellians, Newton moment matching, micro-macro splitting."""

import numpy as np
import pytest

from kinetic_uq import (VelocityGrid, compute_moments, maxwellian,
                        maxwellian_from_moments, micro_macro_split,
                        moment_fields, moment_matched_maxwellian)
from kinetic_uq.errors import NumericalError, ParameterError
from kinetic_uq.phase_grid import MomentSet


@pytest.fixture
def grid():
    return VelocityGrid(32, 8.0)


def test_maxwellian_normalization(grid):
    f = maxwellian(0.7, np.array([0.3, -0.1]), 1.2, grid)
    m = compute_moments(f, grid)
    assert m.rho == pytest.approx(0.7, abs=1e-12)
    # truncated-tail quadrature leaves ~3e-11 on the |v|^2 moment
    assert m.temperature == pytest.approx(1.2, abs=1e-9)


def test_maxwellian_vacuum_gives_zero_field(grid):
    f = maxwellian(0.0, np.array([0.0, 0.0]), 1.0, grid)
    assert np.all(f == 0.0)


def test_maxwellian_rejects_nonpositive_temperature(grid):
    with pytest.raises(ParameterError):
        maxwellian(1.0, np.array([0.0, 0.0]), 0.0, grid)
    with pytest.raises(ParameterError):
        maxwellian(1.0, np.array([0.0, 0.0]), -1.0, grid)


def test_maxwellian_batched_matches_scalar(grid):
    rho = np.array([0.5, 1.5])
    u = np.array([[0.1, 0.2], [-0.3, 0.0]])
    T = np.array([0.8, 1.4])
    batch = maxwellian(rho, u, T, grid)
    for k in range(2):
        single = maxwellian(rho[k], u[k], T[k], grid)
        assert np.array_equal(batch[k], single)


def test_moment_matching_reproduces_discrete_moments(grid):
    # non-Maxwellian input: sum of two shifted Maxwellians
    f = (maxwellian(0.4, np.array([1.0, 0.5]), 0.6, grid)
         + maxwellian(0.6, np.array([-0.8, 0.1]), 1.1, grid))
    eq = moment_matched_maxwellian(moment_fields(f[None], grid), grid)[0]
    mf, me = compute_moments(f, grid), compute_moments(eq, grid)
    # the matched Maxwellian carries the same discrete moments
    assert me.rho == pytest.approx(mf.rho, rel=1e-12)
    assert me.u[0] == pytest.approx(mf.u[0], abs=1e-12)
    assert me.u[1] == pytest.approx(mf.u[1], abs=1e-12)
    assert me.energy == pytest.approx(mf.energy, rel=1e-12)


def test_moment_matching_handles_vacuum_entries(grid):
    f = np.stack([maxwellian(1.0, np.array([0.0, 0.0]), 1.0, grid),
                  np.zeros(grid.shape)])
    eq = moment_matched_maxwellian(moment_fields(f, grid), grid)
    assert np.all(eq[1] == 0.0)
    assert compute_moments(eq[0], grid).rho == pytest.approx(1.0, rel=1e-12)


def test_moment_matching_rejects_inadmissible_energy(grid):
    # kinetic energy alone exceeds the total: no positive temperature fits
    mom = MomentSet(rho=np.array([1.0]), u=np.array([[1.0, 0.0]]),
                    energy=np.array([0.1]))
    with pytest.raises((NumericalError, ParameterError)):
        moment_matched_maxwellian(mom, grid)


def test_maxwellian_from_moments_roundtrip(grid):
    f = maxwellian(1.1, np.array([0.2, -0.4]), 0.9, grid)
    eq = maxwellian_from_moments(compute_moments(f, grid), grid)
    assert np.allclose(eq, f, rtol=0, atol=1e-13)


def test_micro_macro_split_properties(grid):
    f = (maxwellian(0.5, np.array([0.6, 0.0]), 0.7, grid)
         + maxwellian(0.5, np.array([-0.6, 0.0]), 0.7, grid))
    f_eq, g = micro_macro_split(f, grid)
    # reconstruction is exact by construction
    assert np.allclose(f_eq + g, f, rtol=0, atol=1e-15)
    # the fluctuation carries no mass, momentum, or energy
    rho, u1, u2, en = moment_fields(g[None], grid)
    assert abs(rho[0]) < 1e-10
    assert abs(en[0]) < 1e-10
