import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from kinetic_hls.errors import ConfigurationError, DomainError
from kinetic_hls.fieldio import format_csv, read_field, write_field
from kinetic_hls.grids import (DistributionField, PhaseSpaceField, SpatialGrid, Trajectory,
                               VelocityGrid, time_grid)
from kinetic_hls.norms import lp_sum, mixed_lebesgue_norm, trapezoid_weights, weighted_lp_norm


def test_grid_convention():
    g = VelocityGrid(6.0, 12)
    assert g.h == 1.0
    assert g.axis[0] == -6.0 and g.axis[-1] == 5.0
    assert np.allclose(g.index_of(g.axis[3]), 3)


@pytest.mark.parametrize("n", [7, 6, 9])
def test_grid_rejects_bad_counts(n):
    with pytest.raises(ConfigurationError):
        VelocityGrid(6.0, n)


def test_time_grid_requires_multiple():
    assert np.allclose(time_grid(2.0, 0.1), np.linspace(0, 2, 21))
    with pytest.raises(ConfigurationError):
        time_grid(1.0, 0.3)


def test_gaussian_l2_norm():
    g = VelocityGrid(8.0, 32)
    f = DistributionField(g, np.exp(-0.5 * g.speed2()))
    # ||exp(-|v|^2/2)||_2 = pi^(3/4)
    assert math.isclose(weighted_lp_norm(f, 0, 2), math.pi ** 0.75, rel_tol=1e-8)


@given(arrays(np.float64, 20, elements=st.floats(-1e3, 1e3)), st.floats(1.1, 8), st.floats(-5, 5))
@settings(max_examples=50, deadline=None)
def test_lp_sum_homogeneous(a, p, c):
    lhs = lp_sum(c * a, p, 0.5)
    rhs = abs(c) * lp_sum(a, p, 0.5)
    assert math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-300)


def test_lp_sum_large_exponent_no_overflow():
    a = np.full(10, 1e200)
    assert math.isclose(lp_sum(a, 6.0, 1.0), 1e200 * 10 ** (1 / 6), rel_tol=1e-12)
    assert lp_sum(a, math.inf, 1.0) == 1e200


def test_mixed_norm_of_constant_trajectory():
    g = VelocityGrid(4.0, 8)
    sp = SpatialGrid(1, 4.0, 4)
    vals = np.random.default_rng(0).random((4, 8, 8, 8))
    f = PhaseSpaceField(sp, g, vals)
    times = np.linspace(0, 2, 11)
    tr = Trajectory.constant(f, times)
    one = mixed_lebesgue_norm(Trajectory(sp, g, [0.0, 1.0], np.stack([vals, vals])), math.inf, 3, 2)
    assert math.isclose(mixed_lebesgue_norm(tr, 4, 3, 2), 2 ** 0.25 * one, rel_tol=1e-12)
    assert math.isclose(trapezoid_weights(times).sum(), 2.0)


def test_mixed_norm_rejects_exponent_one():
    g = VelocityGrid(4.0, 8)
    tr = Trajectory.constant(PhaseSpaceField(SpatialGrid(), g, np.ones((1, 8, 8, 8))), [0, 1])
    with pytest.raises(DomainError):
        mixed_lebesgue_norm(tr, 1, 2, 2)


def test_field_roundtrip(tmp_path):
    g = VelocityGrid(5.0, 8)
    sp = SpatialGrid(1, 10.0, 3)
    vals = np.random.default_rng(3).random((2, 3, 8, 8, 8))
    tr = Trajectory(sp, g, [0.0, 0.5], vals)
    write_field(tmp_path / "a.khf", tr)
    back = read_field(tmp_path / "a.khf")
    assert back.grid == g and back.space == sp
    assert np.array_equal(back.values, vals) and np.array_equal(back.times, [0.0, 0.5])
    write_field(tmp_path / "b.khf", back)
    assert (tmp_path / "a.khf").read_bytes() == (tmp_path / "b.khf").read_bytes()


def test_field_rejects_garbage(tmp_path):
    p = tmp_path / "bad.khf"
    p.write_bytes(b"NOTAFIELD" * 10)
    with pytest.raises(ConfigurationError):
        read_field(p)


def test_csv_metadata_and_quoting():
    text = format_csv(["a", "b"], [(0.1, "x,y")], {"config_hash": "abc", "version": "0.1.0"})
    lines = text.splitlines()
    assert lines[0] == "a,b"
    assert lines[1] == '0.1,"x,y"'
    assert lines[-2:] == ["# config_hash: abc", "# version: 0.1.0"]
