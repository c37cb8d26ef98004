"""Free transport U(t) and the Duhamel integral W(t) on the slab phase space.

In the slab reduction (d_x = 1) transport acts through the first velocity
component only: U(t)f(x, v) = f(x - v_1 t, v) on a periodic x-grid, evaluated
with linear interpolation. Linear interpolation is a convex combination of two
neighbours, so U(t) maps non-negative data to non-negative data and never
overshoots. In the homogeneous mode (d_x = 0) U(t) is the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, RangeError
from .grids import PhaseSpaceField, SpatialGrid, Trajectory, VelocityGrid
from .norms import trapezoid_weights


@dataclass(frozen=True)
class TransportConfig:
    space: SpatialGrid
    dt: float
    horizon: float
    order: str = "linear"

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("time step must be positive", "time.dt")
        if self.horizon < 0:
            raise ConfigurationError("horizon must be non-negative", "time.T")
        if self.order != "linear":
            raise ConfigurationError("only linear interpolation is supported", "transport.order")

    def check(self, grid: VelocityGrid) -> None:
        """No-wrap rule: max|v_1| * horizon < L/2 in the slab."""
        check_no_wrap(self.space, grid, self.horizon)


def max_speed(grid: VelocityGrid) -> float:
    return float(np.max(np.abs(grid.axis)))


def check_no_wrap(space: SpatialGrid, grid: VelocityGrid, t: float) -> None:
    if space.d_x == 0:
        return
    reach = max_speed(grid) * abs(t)
    if not reach < 0.5 * space.L:
        raise RangeError(
            f"max|v1|*|t| = {reach:.4g} reaches L/2 = {0.5 * space.L:.4g}; support would wrap")


def shift_array(values: np.ndarray, space: SpatialGrid, grid: VelocityGrid, t: float) -> np.ndarray:
    """U(t) on a raw (n_x, n, n, n) array, without the no-wrap check."""
    if space.d_x == 0 or t == 0:
        return values.copy()
    out = np.empty_like(values)
    for i, v1 in enumerate(grid.axis):
        sigma = v1 * t / space.h_x
        k = math.floor(sigma)
        theta = sigma - k
        sl = values[:, i]
        a = np.roll(sl, k, axis=0)
        if theta == 0.0:
            out[:, i] = a
        else:
            out[:, i] = (1.0 - theta) * a + theta * np.roll(sl, k + 1, axis=0)
    return out


def free_transport(f: PhaseSpaceField, t: float) -> PhaseSpaceField:
    """U(t) f, evaluated at time stamp f.t + t."""
    check_no_wrap(f.space, f.grid, t)
    return PhaseSpaceField(f.space, f.grid, shift_array(f.values, f.space, f.grid, t), f.t + t)


def _check_samples(F: Trajectory, t: float) -> int:
    """Index m with F.times[m] == t; the samples must start at 0."""
    if F.n_t < 2 and t != 0:
        raise DomainError("Duhamel integral needs at least two time samples")
    if abs(F.times[0]) > 1e-12:
        raise DomainError("time samples must start at 0")
    m = int(np.argmin(np.abs(F.times - t)))
    if abs(F.times[m] - t) > 1e-9 * max(1.0, abs(t)):
        raise DomainError(f"t = {t} is not on the time grid")
    return m


def duhamel_array(F: Trajectory, m: int) -> np.ndarray:
    """W(t_m)F = int_0^{t_m} U(t_m - s)F(s) ds by the trapezoid rule."""
    out = np.zeros(F.values.shape[1:])
    if m == 0:
        return out
    w = trapezoid_weights(F.times[: m + 1])
    tm = F.times[m]
    for j in range(m + 1):
        if w[j] == 0.0 or not np.any(F.values[j]):
            continue
        out += w[j] * shift_array(F.values[j], F.space, F.grid, tm - F.times[j])
    return out


def duhamel_integral(F: Trajectory, t: float) -> PhaseSpaceField:
    m = _check_samples(F, t)
    check_no_wrap(F.space, F.grid, t)
    return PhaseSpaceField(F.space, F.grid, duhamel_array(F, m), float(F.times[m]))


def duhamel_trajectory(F: Trajectory) -> Trajectory:
    """W(t_i)F at every sample of F."""
    check_no_wrap(F.space, F.grid, F.times[-1])
    vals = np.stack([duhamel_array(F, m) for m in range(F.n_t)])
    return Trajectory(F.space, F.grid, F.times, vals)


def free_trajectory(f0: PhaseSpaceField, times) -> Trajectory:
    """U(t_i) f0 at every sample."""
    times = np.asarray(times, dtype=float)
    check_no_wrap(f0.space, f0.grid, times[-1])
    vals = np.stack([shift_array(f0.values, f0.space, f0.grid, t) for t in times])
    return Trajectory(f0.space, f0.grid, times, vals)
