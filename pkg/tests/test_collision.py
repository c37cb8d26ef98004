import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from kinetic_hls.collision import (CollisionKernel, conservation_defect, gain_term, loss_factor,
                                   loss_term, post_collision_velocities, sharpen,
                                   translated_radon_apply)
from kinetic_hls.errors import ConfigurationError, DomainError
from kinetic_hls.grids import DistributionField, VelocityGrid
from kinetic_hls.lab import GaussianMixture
from kinetic_hls.quadrature import build_hemisphere_quadrature


def test_exchange_and_orthogonal_cases():
    vp, vs = post_collision_velocities([1, 0, 0], [-1, 0, 0], [1, 0, 0])
    assert np.allclose(vp, [-1, 0, 0]) and np.allclose(vs, [1, 0, 0])
    vp, vs = post_collision_velocities([1, 0, 0], [-1, 0, 0], [0, 1, 0])
    assert np.allclose(vp, [1, 0, 0]) and np.allclose(vs, [-1, 0, 0])


def test_collision_invariants_random_triples(rng):
    v = rng.normal(size=(1000, 3))
    vs = rng.normal(size=(1000, 3))
    w = rng.normal(size=(1000, 3))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    vp, vsp = post_collision_velocities(v, vs, w)
    assert np.max(np.abs(vp + vsp - v - vs)) < 1e-13
    e0 = np.sum(v ** 2 + vs ** 2, axis=1)
    e1 = np.sum(vp ** 2 + vsp ** 2, axis=1)
    assert np.max(np.abs(e1 - e0)) < 1e-13


def test_non_unit_omega_rejected():
    with pytest.raises(DomainError):
        post_collision_velocities([0, 0, 0], [1, 0, 0], [1, 1, 0])


def test_kernel_range():
    with pytest.raises(ConfigurationError):
        CollisionKernel(1.5)
    assert CollisionKernel(1).name == "hard-sphere"


@given(arrays(np.float64, (6, 5, 4), elements=st.floats(-1, 1)))
@settings(max_examples=40, deadline=None)
def test_sharpen_preserves_sum(a):
    assert math.isclose(sharpen(a).sum(), a.sum(), abs_tol=1e-11)


def test_sharpen_symbol_inverts_hat_blur():
    # on a cosine mode the filter multiplies by 1 + D/12 + D^2/90 + D^3/560, D = 4 sin^2(k/2)
    k = 0.5
    a = np.cos(k * np.arange(200))
    gain = sharpen(a)[80:120] / a[80:120]
    D = 4 * np.sin(k / 2) ** 2
    expected = 1 + D / 12 + D ** 2 / 90 + D ** 3 / 560
    assert np.allclose(gain, expected, rtol=1e-10)
    # and it undoes the deposit blur sinc^2(k/2) to sixth order
    assert abs(expected * np.sinc(k / 2 / np.pi) ** 2 - 1) < 1e-4


def _maxwellian(grid):
    return DistributionField(grid, np.exp(-grid.speed2()), True)


@pytest.mark.parametrize("gamma", [0.0, 1.0])
def test_zero_inputs(gamma, small_grid, coarse_quad):
    z = DistributionField(small_grid, np.zeros((8, 8, 8)), True)
    k = CollisionKernel(gamma)
    assert not np.any(gain_term(z, z, k, coarse_quad).values)
    assert not np.any(loss_factor(z, k, coarse_quad).values)


def test_loss_maxwell_molecules_is_pi_mass(small_grid, coarse_quad):
    g = _maxwellian(small_grid)
    L = loss_factor(g, CollisionKernel(0), coarse_quad)
    assert np.allclose(L.values, math.pi * g.mass(), rtol=1e-13)


def test_loss_hard_sphere_far_field():
    grid = VelocityGrid(8.0, 16)
    vals = np.zeros((16, 16, 16))
    vals[8, 8, 8] = 1.0   # point mass at the origin
    g = DistributionField(grid, vals, True)
    L = loss_factor(g, CollisionKernel(1), build_hemisphere_quadrature(2, 4))
    X, Y, Z = grid.mesh()
    r = np.sqrt(X ** 2 + Y ** 2 + Z ** 2)
    far = r > 3
    assert np.allclose(L.values[far], math.pi * g.mass() * r[far], rtol=1e-12)


@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("sharp", [False, True])
def test_conservation_small_grid(gamma, sharp):
    grid = VelocityGrid(6.0, 12)
    q = build_hemisphere_quadrature(2, 4)
    f = GaussianMixture.single((0.3, -0.2, 0.1), 0.8).sample(grid)
    g = GaussianMixture.single((-0.4, 0.2, 0.0), 0.7).sample(grid)
    d = conservation_defect(f, g, CollisionKernel(gamma), q, sharpen_output=sharp)
    assert d["defect"] < 1e-2


def test_gain_mass_maxwell_molecules(small_grid, coarse_quad):
    f = GaussianMixture.single(sigma=0.8).sample(small_grid)
    qp = gain_term(f, f, CollisionKernel(0), coarse_quad, sharpen_output=False)
    assert math.isclose(qp.mass(), math.pi * f.mass() ** 2, rel_tol=1e-3)


def test_gain_positive_and_monotone(rng, small_grid, coarse_quad):
    k = CollisionKernel(1)
    f = DistributionField(small_grid, rng.random((8, 8, 8)), True)
    g = DistributionField(small_grid, rng.random((8, 8, 8)), True)
    bump = DistributionField(small_grid, f.values + rng.random((8, 8, 8)), True)
    a = gain_term(f, g, k, coarse_quad, sharpen_output=False).values
    b = gain_term(bump, g, k, coarse_quad, sharpen_output=False).values
    assert np.all(a >= 0)
    assert np.all(b >= a)


def test_sharpened_deposit_is_closest_to_equilibrium():
    grid = VelocityGrid(6.0, 12)
    q = build_hemisphere_quadrature(4, 8)
    m = _maxwellian(grid)
    k = CollisionKernel(1)
    loss = loss_term(m, m, k, q).values

    def err(**kw):
        return np.max(np.abs(gain_term(m, m, k, q, **kw).values - loss)) / loss.max()

    sharp = err()
    assert sharp < 0.03
    assert sharp < err(sharpen_output=False)
    assert sharp < err(scheme="interp")


def test_stride_and_scheme_validation(small_grid, coarse_quad):
    f = _maxwellian(small_grid)
    with pytest.raises(ConfigurationError):
        gain_term(f, f, CollisionKernel(0), coarse_quad, scheme="spectral")
    with pytest.raises(ConfigurationError):
        gain_term(f, f, CollisionKernel(0), coarse_quad, stride=0)


def test_grid_mismatch(coarse_quad):
    a = _maxwellian(VelocityGrid(6.0, 8))
    b = _maxwellian(VelocityGrid(5.0, 8))
    with pytest.raises(DomainError):
        gain_term(a, b, CollisionKernel(0), coarse_quad)


def test_radon_constant_gives_pi_in_interior():
    grid = VelocityGrid(6.0, 16)
    h = DistributionField(grid, np.ones((16, 16, 16)), True)
    out = translated_radon_apply(h, (0.0, 0.0, 0.0), CollisionKernel(0), build_hemisphere_quadrature(4, 8))
    X, Y, Z = grid.mesh()
    inner = np.sqrt(X ** 2 + Y ** 2 + Z ** 2) < 4.5
    assert np.allclose(out.values[inner], math.pi, rtol=1e-12)


def test_radon_vanishes_at_vstar_for_hard_sphere():
    grid = VelocityGrid(6.0, 16)
    h = _maxwellian(grid)
    vs = (grid.axis[8], grid.axis[8], grid.axis[8])
    out = translated_radon_apply(h, vs, CollisionKernel(1), build_hemisphere_quadrature(4, 8))
    assert out.values[8, 8, 8] == 0.0
    z = DistributionField(grid, np.zeros((16, 16, 16)), True)
    assert not np.any(translated_radon_apply(z, vs, CollisionKernel(1), build_hemisphere_quadrature(4, 8)).values)
