"""Discrete weighted and mixed Lebesgue norms.

All sums go through ``numpy.sum`` (pairwise summation in a fixed order), so the
results do not depend on how the callers were parallelised.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .grids import DistributionField, Trajectory, VelocityGrid


def _check_exponent(p, allow_inf=False, name="p"):
    p = float(p)
    if allow_inf and math.isinf(p) and p > 0:
        return p
    if not (1.0 < p < math.inf):
        raise DomainError(f"exponent {name}={p} outside (1, inf)")
    return p


def lp_sum(values: np.ndarray, p: float, measure: float, axis=None):
    """(sum |values|^p * measure)^(1/p) along ``axis``; p = inf gives the max."""
    a = np.abs(values)
    if math.isinf(p):
        return a.max(axis=axis)
    if p == 1.0:
        return a.sum(axis=axis) * measure
    # scale by the max to keep large p away from overflow
    m = a.max(axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    s = ((a / safe) ** p).sum(axis=axis, keepdims=True) * measure
    out = safe * s ** (1.0 / p)
    out = np.where(m > 0, out, 0.0)
    return out.squeeze(axis=axis) if axis is not None else float(out.squeeze())


def weighted_lp_norm(f, ell: float = 0.0, p: float = 2.0) -> float:
    """(sum_i |<v_i>^ell f(v_i)|^p h^3)^(1/p) for a DistributionField."""
    p = _check_exponent(p)
    if ell < 0:
        raise DomainError("weight exponent must be >= 0")
    g = f.grid
    vals = f.values if ell == 0 else f.values * g.bracket(ell)
    return float(lp_sum(vals, p, g.cell_volume))


def velocity_norm(values: np.ndarray, grid: VelocityGrid, ell: float, p: float) -> np.ndarray:
    """Weighted L^p_v norm over the trailing three axes (p may be inf)."""
    w = grid.bracket(ell) if ell else 1.0
    flat = (values * w).reshape(values.shape[:-3] + (-1,))
    return lp_sum(flat, p, grid.cell_volume, axis=-1)


def trapezoid_weights(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        return np.zeros(times.size)
    dt = times[1] - times[0]
    w = np.full(times.size, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def mixed_lebesgue_norm(traj: Trajectory, q, r, p, ell: float = 0.0) -> float:
    """L^q_t L^r_x L^p_v norm of a trajectory (inner norm in v, then x, then t).

    Exponents may be ``inf``. The time integral uses trapezoid weights, so a
    time-constant trajectory on [0, T] has norm T^(1/q) times its slice norm.
    """
    if traj is None or traj.values.size == 0:
        raise DomainError("empty trajectory")
    q = _check_exponent(q, True, "q")
    r = _check_exponent(r, True, "r")
    p = _check_exponent(p, True, "p")
    inner = velocity_norm(traj.values, traj.grid, ell, p)          # (n_t, n_x)
    xs = lp_sum(inner, r, traj.space.h_x, axis=1)                    # (n_t,)
    if math.isinf(q):
        return float(np.max(xs))
    if traj.n_t < 2:
        raise DomainError("finite time exponent needs at least two time samples")
    w = trapezoid_weights(traj.times)
    return float(np.sum(w * xs ** q) ** (1.0 / q))


def bracket_weighted(f: DistributionField, ell: float) -> DistributionField:
    return f.with_values(f.values * f.grid.bracket(ell))
