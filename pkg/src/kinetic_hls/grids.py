"""Velocity and phase-space grids plus the field containers living on them.

Grid convention: ``v_i = -R + i*h`` for ``i = 0..n-1`` with ``h = 2R/n``.
The node set therefore contains the origin and is symmetric about it except
for the single extra layer at ``-R`` (there is no node at ``+R``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError

MIN_POINTS = 8


@dataclass(frozen=True)
class VelocityGrid:
    R: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.R) or self.R <= 0:
            raise ConfigurationError(f"extent R must be positive, got {self.R}", "grid.R")
        if int(self.n) != self.n or self.n < MIN_POINTS or self.n % 2:
            raise ConfigurationError(
                f"points per axis must be an even integer >= {MIN_POINTS}, got {self.n}", "grid.n")

    @property
    def h(self) -> float:
        return 2.0 * self.R / self.n

    @property
    def size(self) -> int:
        return self.n ** 3

    @property
    def axis(self) -> np.ndarray:
        return -self.R + self.h * np.arange(self.n)

    @property
    def cell_volume(self) -> float:
        return self.h ** 3

    def mesh(self):
        """Return the three coordinate arrays with shape (n, n, n), 'ij' indexing."""
        a = self.axis
        return np.meshgrid(a, a, a, indexing="ij")

    def points(self) -> np.ndarray:
        """Node coordinates, shape (n**3, 3), lexicographic order."""
        return np.stack([c.ravel() for c in self.mesh()], axis=1)

    def speed2(self) -> np.ndarray:
        X, Y, Z = self.mesh()
        return X * X + Y * Y + Z * Z

    def bracket(self, ell: float = 1.0) -> np.ndarray:
        """Japanese bracket <v>^ell = (1+|v|^2)^(ell/2) on the nodes."""
        return (1.0 + self.speed2()) ** (0.5 * ell)

    def index_of(self, v) -> np.ndarray:
        """Continuous index coordinates of a velocity (node i sits at index i)."""
        return (np.asarray(v, dtype=float) + self.R) / self.h

    def dilated(self, lam: float) -> "VelocityGrid":
        """Same node count, extent divided by lam (used for exact dilations)."""
        return VelocityGrid(self.R / lam, self.n)


def build_velocity_grid(R: float, n: int) -> VelocityGrid:
    return VelocityGrid(float(R), int(n))


@dataclass
class DistributionField:
    grid: VelocityGrid
    values: np.ndarray
    nonnegative: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        n = self.grid.n
        if v.size != n ** 3:
            raise DomainError(f"expected {n**3} values, got {v.size}")
        v = v.reshape(n, n, n)
        if not np.all(np.isfinite(v)):
            raise DomainError("field values must be finite")
        if self.nonnegative and np.any(v < 0):
            raise DomainError("field flagged non-negative has negative entries")
        self.values = v

    def mass(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)

    def with_values(self, values, nonnegative: bool = False) -> "DistributionField":
        return DistributionField(self.grid, values, nonnegative)

    def __add__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c):
        return self.with_values(self.values * float(c))

    __rmul__ = __mul__


def _same_grid(a, b):
    if a.grid != b.grid:
        raise DomainError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic slab in x_1 (d_x=1) or a single cell (d_x=0)."""
    d_x: int = 0
    L: float = 1.0
    n_x: int = 1

    def __post_init__(self):
        if self.d_x not in (0, 1):
            raise ConfigurationError("spatial dimension must be 0 or 1", "space.d_x")
        if self.d_x == 0 and self.n_x != 1:
            raise ConfigurationError("homogeneous mode uses exactly one spatial cell", "space.n_x")
        if self.d_x == 1 and (self.n_x < 2 or not self.L > 0):
            raise ConfigurationError("slab needs n_x >= 2 and L > 0", "space.n_x")

    @property
    def h_x(self) -> float:
        return self.L / self.n_x if self.d_x == 1 else 1.0

    @property
    def axis(self) -> np.ndarray:
        if self.d_x == 0:
            return np.zeros(1)
        return -0.5 * self.L + self.h_x * np.arange(self.n_x)


@dataclass
class PhaseSpaceField:
    space: SpatialGrid
    grid: VelocityGrid
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        shape = (self.space.n_x,) + (self.grid.n,) * 3
        if v.size != int(np.prod(shape)):
            raise DomainError(f"expected {shape} values, got shape {v.shape}")
        v = v.reshape(shape)
        if not np.all(np.isfinite(v)):
            raise DomainError("phase-space values must be finite")
        self.values = v

    @classmethod
    def homogeneous(cls, f: DistributionField, t: float = 0.0) -> "PhaseSpaceField":
        return cls(SpatialGrid(), f.grid, f.values[None].copy(), t)

    def mass(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume * self.space.h_x)


@dataclass
class Trajectory:
    """Uniformly sampled time series of phase-space fields.

    ``values`` has shape (n_t, n_x, n, n, n).
    """
    space: SpatialGrid
    grid: VelocityGrid
    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or self.times.size == 0:
            raise DomainError("trajectory needs at least one time sample")
        shape = (self.times.size, self.space.n_x) + (self.grid.n,) * 3
        self.values = np.asarray(self.values, dtype=float).reshape(shape)
        if self.times.size > 1:
            dt = np.diff(self.times)
            if np.any(dt <= 0) or np.ptp(dt) > 1e-9 * max(1.0, abs(dt[0])):
                raise DomainError("time grid must be uniform and increasing")

    @property
    def n_t(self) -> int:
        return self.times.size

    def slice(self, k: int) -> PhaseSpaceField:
        return PhaseSpaceField(self.space, self.grid, self.values[k], float(self.times[k]))

    def masses(self) -> np.ndarray:
        return self.values.reshape(self.n_t, -1).sum(axis=1) * self.grid.cell_volume * self.space.h_x

    @classmethod
    def constant(cls, f: PhaseSpaceField, times) -> "Trajectory":
        times = np.asarray(times, dtype=float)
        vals = np.broadcast_to(f.values, (times.size,) + f.values.shape).copy()
        return cls(f.space, f.grid, times, vals)


def time_grid(T: float, dt: float) -> np.ndarray:
    """Uniform grid 0, dt, ..., T; T must be an integer multiple of dt (to 1e-9)."""
    if not (T >= 0 and dt > 0):
        raise ConfigurationError("need T >= 0 and dt > 0", "time")
    m = int(round(T / dt))
    if abs(m * dt - T) > 1e-9 * max(1.0, T):
        raise ConfigurationError(f"horizon {T} is not a multiple of dt={dt}", "time.dt")
    return dt * np.arange(m + 1)
