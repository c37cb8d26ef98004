import math
from fractions import Fraction as F

import numpy as np
import pytest

from kinetic_hls.collision import CollisionKernel
from kinetic_hls.errors import DomainError, RangeError
from kinetic_hls.exponents import HlsExponents
from kinetic_hls.grids import DistributionField, VelocityGrid
from kinetic_hls.lab import (GaussianMixture, estimate_ratio, mixture_pair_family, moment_probe,
                             scaling_sweep, shifted_gaussian_family, translation_probe)
from kinetic_hls.quadrature import build_hemisphere_quadrature

# Richardson extrapolation of n = 16, 24 runs (4.1041, 4.0896) with (n_mu, n_phi) = (4, 8)
BASELINE_GAMMA0 = 4.078


def test_mixture_family_is_seeded():
    a = mixture_pair_family(7, 5)
    b = mixture_pair_family(7, 5)
    c = mixture_pair_family(8, 5)
    assert a.members == b.members and a.members != c.members
    assert a.radius <= 1.5
    a.check_grid(VelocityGrid(6.0, 16))
    with pytest.raises(RangeError):
        a.check_grid(VelocityGrid(4.0, 16))


def test_dilate_and_translate_parameters():
    m = GaussianMixture.single((1.0, 0.0, 0.0), 1.0)
    g = VelocityGrid(6.0, 16)
    d = m.dilate(2.0)
    X, Y, Z = g.mesh()
    assert np.allclose(d.sample(g).values, np.exp(-((2 * X - 1) ** 2 + (2 * Y) ** 2 + (2 * Z) ** 2) / 2))
    assert m.translate((1, 2, 3)).centers == ((2.0, 2.0, 3.0),)


def test_zero_input_rejected():
    g = VelocityGrid(6.0, 8)
    z = DistributionField(g, np.zeros((8, 8, 8)), True)
    f = GaussianMixture.single().sample(g)
    e = HlsExponents(F(2, 3), F(2, 3), F(1, 3))
    with pytest.raises(DomainError):
        estimate_ratio(z, f, e, CollisionKernel(0), build_hemisphere_quadrature(2, 4))


def test_baseline_ratio_and_resolution():
    e = HlsExponents(F(2, 3), F(2, 3), F(1, 3))
    q = build_hemisphere_quadrature(4, 8)
    vals = []
    for n in (12, 16):
        g = VelocityGrid(6.0, n)
        f = GaussianMixture.single().sample(g)
        vals.append(estimate_ratio(f, f, e, CollisionKernel(0), q).ratio)
    assert abs(vals[0] - vals[1]) < 0.02 * vals[1]
    assert abs(vals[1] - BASELINE_GAMMA0) < 0.01 * BASELINE_GAMMA0


@pytest.mark.parametrize("gamma", [0, 1])
def test_dilate_sweep_slopes_are_exact(gamma):
    g = F(gamma)
    ir = F(1, 3) if gamma == 0 else F(1, 6)
    base = (1 + ir + g / 3) / 2
    exps = [HlsExponents(base + d / 2, base + d / 2, ir, g) for d in (F(-1, 3), F(0), F(1, 3))]
    m = GaussianMixture.single()
    res = scaling_sweep(m, m, exps, CollisionKernel(gamma), build_hemisphere_quadrature(2, 4),
                        VelocityGrid(6.0, 8))
    for k in res.slopes:
        assert abs(res.slopes[k] - res.expected[k]) < 1e-9


def test_degenerate_sweep():
    m = GaussianMixture.single()
    e = HlsExponents(F(2, 3), F(2, 3), F(1, 3))
    res = scaling_sweep(m, m, e, CollisionKernel(0), build_hemisphere_quadrature(2, 4),
                        VelocityGrid(6.0, 8), lambdas=[1])
    assert list(res.slopes.values()) == [None]
    with pytest.raises(DomainError):
        scaling_sweep(m, m, e, CollisionKernel(0), build_hemisphere_quadrature(2, 4),
                      VelocityGrid(6.0, 8), lambdas=[1, 2])


def test_fixed_mode_range_check():
    m = GaussianMixture.single(sigma=2.0)
    e = HlsExponents(F(2, 3), F(2, 3), F(1, 3))
    with pytest.raises(RangeError):
        scaling_sweep(m, m, e, CollisionKernel(0), build_hemisphere_quadrature(2, 4),
                      VelocityGrid(3.0, 8), lambdas=[0.25, 0.5, 1, 2], mode="fixed")


def test_moment_probe_small():
    rep = moment_probe(1, 2, CollisionKernel(1), build_hemisphere_quadrature(2, 4), VelocityGrid(6.0, 8))
    assert rep.exponents.delta == 0
    assert rep.ratios[0] > 0
    assert rep.spread <= 10
    assert rep.comparator.ip + rep.comparator.iq == 1 + rep.comparator.ir


def test_shifted_family_labels():
    fam = shifted_gaussian_family((0, 2), direction=(0, 3, 4))
    assert fam.members[1].centers == ((0.0, 1.2, 1.6),)


def test_translation_probe_identity_and_flags():
    g = VelocityGrid(6.0, 12)
    h = GaussianMixture.single().sample(g)
    q = build_hemisphere_quadrature(2, 4)
    rep = translation_probe(h, F(1, 2), 0, [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)], CollisionKernel(0), q)
    assert rep.ratios[0] == rep.baseline
    assert rep.in_theorem_range and rep.tail_integrable
    rep1 = translation_probe(h, F(1, 2), 1, [(0.0, 0.0, 0.0)], CollisionKernel(1), q)
    assert not rep1.tail_integrable
    with pytest.raises(DomainError):
        translation_probe(h, F(1, 2), 1, [(0.0, 0.0, 0.0)], CollisionKernel(0), q)
