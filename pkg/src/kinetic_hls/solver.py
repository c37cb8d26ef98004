"""Desk-scale mild-solution solvers for the cutoff Boltzmann equation.

* :func:`gain_only_solve` - Picard iteration for f = U f0 + W Q+(f, f).
* :func:`damped_linear_step` - the linear problem
  d_t g + v.grad_x g + g L = S solved along characteristics with an exact
  exponential factor.
* :func:`ks_iterate` - the Kaniel-Shinbrot bracket: upper iterates g_n move
  down, lower iterates h_n move up, and their midpoint is the reported
  solution with the gap as an error bar.
* :func:`scattering_probe` - Cauchy residuals of B(t) = U(-t) f(t).

All gain terms use the positive deposit scheme without sharpening, so every
map in the iteration is monotone and the bracket ordering holds up to
round-off.
"""
from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .collision import CollisionKernel, gain_array, loss_array
from .errors import (ConfigurationError, ConvergenceError, DivergenceError, DomainError,
                     MonotonicityError)
from .grids import PhaseSpaceField, SpatialGrid, Trajectory, VelocityGrid, time_grid
from .norms import lp_sum, mixed_lebesgue_norm
from .quadrature import HemisphereQuadrature, build_hemisphere_quadrature
from .transport import check_no_wrap, duhamel_trajectory, free_trajectory, shift_array

log = logging.getLogger(__name__)

EPS_NUM = 1e-10
# (q, r, p) = (6, 18/5, 18/7): the KT-admissible triplet used for the gap norm
GAP_EXPONENTS = (6.0, 18.0 / 5.0, 18.0 / 7.0)


@dataclass(frozen=True)
class SolveConfig:
    gamma: float = 0.0
    ell: float = 2.0
    T: float = 2.0
    dt: float = 0.1
    space: SpatialGrid = SpatialGrid()
    grid: VelocityGrid = VelocityGrid(5.0, 10)
    n_mu: int = 4
    n_phi: int = 8
    eta: float = 1e-2
    picard_tol: float = 1e-10
    picard_max_iter: int = 40
    ks_tol: float = 1e-6
    ks_max_iter: int = 15

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0):
            raise ConfigurationError("gamma must lie in [0, 1]", "solver.gamma")
        bound = 2 * Fraction(self.gamma).limit_denominator(1000) + Fraction(10, 9)
        if not Fraction(self.ell).limit_denominator(1000) > bound:
            raise ConfigurationError(f"weight ell = {self.ell} must exceed 2 gamma + 10/9 = {float(bound):.4g}",
                                     "solver.ell")
        if not self.eta > 0:
            raise ConfigurationError("eta must be positive", "solver.eta")
        if self.picard_max_iter < 1 or self.ks_max_iter < 1:
            raise ConfigurationError("iteration caps must be positive", "solver.max_iter")
        time_grid(self.T, self.dt)

    @property
    def times(self) -> np.ndarray:
        return time_grid(self.T, self.dt)

    @property
    def kernel(self) -> CollisionKernel:
        return CollisionKernel(self.gamma)

    @property
    def squad(self) -> HemisphereQuadrature:
        return build_hemisphere_quadrature(self.n_mu, self.n_phi)


def weighted_l3(values: np.ndarray, space: SpatialGrid, grid: VelocityGrid, ell: float) -> float:
    """||<v>^ell f||_{L^3_{x,v}} of one phase-space slice."""
    return float(lp_sum(values * grid.bracket(ell), 3.0, grid.cell_volume * space.h_x))


def initial_data(cfg: SolveConfig, sigma_v: float = 1.0, sigma_x: float = 1.5) -> PhaseSpaceField:
    """Maxwellian in v (times a Gaussian bump in x for the slab), scaled so
    that ||<v>^ell f0||_3 = eta."""
    X, Y, Z = cfg.grid.mesh()
    m = np.exp(-(X * X + Y * Y + Z * Z) / (2 * sigma_v ** 2))
    xs = cfg.space.axis
    bump = np.exp(-xs ** 2 / (2 * sigma_x ** 2)) if cfg.space.d_x == 1 else np.ones(1)
    vals = bump[:, None, None, None] * m[None]
    vals *= cfg.eta / weighted_l3(vals, cfg.space, cfg.grid, cfg.ell)
    return PhaseSpaceField(cfg.space, cfg.grid, vals, 0.0)


class _GainCache:
    """Memo of Q+ slices keyed by content (many slices repeat, e.g. t = 0)."""

    def __init__(self, cfg: SolveConfig):
        self.cfg = cfg
        self.kernel = cfg.kernel
        self.squad = cfg.squad
        self.store = {}
        self.hits = 0
        self.calls = 0

    def gain(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        self.calls += 1
        if not np.any(f) or not np.any(g):
            return np.zeros_like(f)
        key = hashlib.sha1(f.tobytes() + g.tobytes()).hexdigest()
        hit = self.store.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        out = gain_array(f, g, self.cfg.grid, self.kernel, self.squad, scheme="deposit", sharpen_output=False)
        self.store[key] = out
        return out

    def gain_traj(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Q+(a, b) slice by slice for arrays of shape (n_t, n_x, n, n, n)."""
        out = np.empty_like(a)
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                out[i, j] = self.gain(np.ascontiguousarray(a[i, j]), np.ascontiguousarray(b[i, j]))
        return out

    def loss_traj(self, a: np.ndarray) -> np.ndarray:
        out = np.empty_like(a)
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                out[i, j] = loss_array(a[i, j], self.cfg.grid, self.kernel, self.squad) if np.any(a[i, j]) else 0.0
        return out


def _traj(cfg: SolveConfig, values, meta=None) -> Trajectory:
    return Trajectory(cfg.space, cfg.grid, cfg.times, values, dict(meta or {}))


def _gap_norm(cfg: SolveConfig, values: np.ndarray) -> float:
    q, r, p = GAP_EXPONENTS
    return mixed_lebesgue_norm(_traj(cfg, values), q, r, p, cfg.ell)


def _check_f0(f0: PhaseSpaceField, cfg: SolveConfig) -> float:
    if f0.space != cfg.space or f0.grid != cfg.grid:
        raise DomainError("initial field does not match the configured grids")
    if np.any(f0.values < 0):
        raise DomainError("initial data must be non-negative")
    size = weighted_l3(f0.values, cfg.space, cfg.grid, cfg.ell)
    if size > cfg.eta * (1 + 1e-9):
        raise DomainError(f"||<v>^ell f0||_3 = {size:.4g} exceeds eta = {cfg.eta:.4g}")
    check_no_wrap(cfg.space, cfg.grid, cfg.T)
    return size


@dataclass
class PicardResult:
    trajectory: Trajectory
    differences: list
    factors: list
    iterations: int

    @property
    def contraction(self) -> float:
        return max(self.factors) if self.factors else 0.0


def gain_only_solve(f0: PhaseSpaceField, cfg: SolveConfig, cache: _GainCache | None = None,
                    max_iter: int | None = None, tol: float | None = None) -> PicardResult:
    """Picard iteration f^(k+1) = U f0 + W Q+(f^(k), f^(k)) from f^(0) = U f0.

    Stops when the successive difference in the gap norm drops below ``tol``
    times the norm of U f0. A successive-difference ratio >= 1 aborts with a
    :class:`DivergenceError` carrying the measured factor.
    """
    _check_f0(f0, cfg)
    cache = cache or _GainCache(cfg)
    max_iter = cfg.picard_max_iter if max_iter is None else max_iter
    tol = cfg.picard_tol if tol is None else tol
    free = free_trajectory(f0, cfg.times).values
    cur = free
    scale = _gap_norm(cfg, free)
    diffs, factors = [], []
    if scale == 0:
        return PicardResult(_traj(cfg, free), [], [], 0)
    for k in range(max_iter):
        src = cache.gain_traj(cur, cur)
        nxt = free + duhamel_trajectory(_traj(cfg, src)).values
        if np.any(nxt < 0):
            raise DomainError("negative Picard iterate")  # cannot happen with the positive scheme
        d = _gap_norm(cfg, nxt - cur)
        diffs.append(d)
        if len(diffs) >= 2 and diffs[-2] > 0:
            factors.append(d / diffs[-2])
            if factors[-1] >= 1.0 and d > 1e-13 * scale:
                raise DivergenceError(f"Picard successive differences grow (factor {factors[-1]:.3g})",
                                      factors[-1])
        cur = nxt
        log.debug("picard %d: diff %.3e", k, d)
        if d <= tol * scale:
            return PicardResult(_traj(cfg, cur, {"kind": "gain-only"}), diffs, factors, k + 1)
    raise ConvergenceError(f"Picard iteration did not reach {tol:g} in {max_iter} steps", diffs)


def damped_linear_step(source: np.ndarray, damping: np.ndarray, f0: PhaseSpaceField,
                       cfg: SolveConfig) -> np.ndarray:
    """Mild solution of d_t u + v.grad_x u + u * damping = source, u(0) = f0.

    Along the characteristic that ends at (t_i, x, v),

        u(t_i) = exp(-E_i(0)) U(t_i) f0 + sum_j c_j exp(-E_i(j)) U(t_i - t_j) S(t_j),
        E_i(j) = trapezoid over t_k in [t_j, t_i] of U(t_i - t_k) damping(t_k),

    with trapezoid weights c_j. The exponential factor lies in (0, 1], so the
    result is non-negative and never exceeds the undamped Duhamel value.
    Arrays have shape (n_t, n_x, n, n, n).
    """
    if np.any(damping < 0):
        raise DomainError("damping must be non-negative")
    if np.any(source < 0):
        raise DomainError("source must be non-negative")
    times = cfg.times
    nt = times.size
    dt = cfg.dt
    sp, gr = cfg.space, cfg.grid
    out = np.empty((nt,) + f0.values.shape)
    for i in range(nt):
        ti = times[i]
        moved_L = [shift_array(damping[k], sp, gr, ti - times[k]) if np.any(damping[k]) else None
                   for k in range(i + 1)]
        E = [None] * (i + 1)
        acc = np.zeros(f0.values.shape)
        E[i] = acc.copy()
        for j in range(i - 1, -1, -1):
            for k in (j, j + 1):
                if moved_L[k] is not None:
                    acc = acc + 0.5 * dt * moved_L[k]
            E[j] = acc.copy()
        val = np.exp(-E[0]) * shift_array(f0.values, sp, gr, ti)
        for j in range(i + 1 if i > 0 else 0):
            if not np.any(source[j]):
                continue
            c = dt if 0 < j < i else 0.5 * dt
            val += c * np.exp(-E[j]) * shift_array(source[j], sp, gr, ti - times[j])
        out[i] = val
    return out


@dataclass(frozen=True)
class IterationState:
    n: int
    g: np.ndarray
    h: np.ndarray
    defect_g: float        # min(g_{n-1} - g_n), relative
    defect_h: float        # min(h_n - h_{n-1}), relative
    defect_gap: float      # min(g_n - h_n), relative
    gap: float
    ratio: float | None

    def row(self) -> dict:
        return {"n": self.n, "defect_g": self.defect_g, "defect_h": self.defect_h,
                "defect_gap": self.defect_gap, "gap": self.gap,
                "ratio": "" if self.ratio is None else self.ratio}


def _min_loc(a: np.ndarray, scale: float):
    idx = np.unravel_index(int(np.argmin(a)), a.shape)
    return float(a[idx]) / scale, idx


def _check_order(name: str, diff: np.ndarray, scale: float, n: int) -> float:
    m, loc = _min_loc(diff, scale)
    if m < -EPS_NUM:
        raise MonotonicityError(f"{name} violated at iteration {n}: relative defect {m:.3e}",
                                {"iteration": n, "check": name, "index": tuple(int(i) for i in loc)})
    return m


@dataclass
class KsResult:
    states: list
    limit: Trajectory
    gap: float
    picard: PicardResult
    g2_picard_discrepancy: float
    beginning_condition: dict
    uniqueness: dict | None = None

    @property
    def gaps(self) -> list:
        return [s.gap for s in self.states]

    @property
    def ratios(self) -> list:
        return [s.ratio for s in self.states if s.ratio is not None]


def _bracket_loop(g: np.ndarray, h: np.ndarray, f0: PhaseSpaceField, cfg: SolveConfig,
                  cache: _GainCache, scale: float, n0: int, states: list) -> tuple:
    """Alternate the two damped solves until the gap falls below ks_tol."""
    n = n0
    while True:
        gap = states[-1].gap
        if gap < cfg.ks_tol:
            return g, h
        if n >= cfg.ks_max_iter:
            raise ConvergenceError(f"bracket gap {gap:.3e} above {cfg.ks_tol:g} after {n} iterations",
                                   [s.gap for s in states])
        qg = cache.gain_traj(g, g)
        qh = cache.gain_traj(h, h)
        g_new = damped_linear_step(qg, cache.loss_traj(h), f0, cfg)
        h_new = damped_linear_step(qh, cache.loss_traj(g), f0, cfg)
        n += 1
        dg = _check_order("g_{n+1} <= g_n", g - g_new, scale, n)
        dh = _check_order("h_n <= h_{n+1}", h_new - h, scale, n)
        dgap = _check_order("h_n <= g_n", g_new - h_new, scale, n)
        new_gap = _gap_norm(cfg, g_new - h_new)
        states.append(IterationState(n, g_new, h_new, dg, dh, dgap, new_gap,
                                     new_gap / gap if gap > 0 else None))
        log.info("ks %d: gap %.3e", n, new_gap)
        g, h = g_new, h_new


def ks_iterate(f0: PhaseSpaceField, cfg: SolveConfig, probe_uniqueness: bool = False,
               cache: _GainCache | None = None, picard: PicardResult | None = None) -> KsResult:
    """Kaniel-Shinbrot bracket started from g_1 = f_+ (gain-only solution), h_1 = 0.

    The update is
        d_t g_{n+1} + v.grad_x g_{n+1} + g_{n+1} L(h_n) = Q+(g_n, g_n),
        d_t h_{n+1} + v.grad_x h_{n+1} + h_{n+1} L(g_n) = Q+(h_n, h_n).
    With h_1 = 0 the first g-update reproduces the fixed point, so g_2 is set
    to g_1 exactly; the recomputed value is kept only as a Picard-error
    diagnostic. The beginning condition 0 <= h_1 <= h_2 <= g_2 <= g_1 and the
    ordering at every later step are asserted to within EPS_NUM relative.
    """
    _check_f0(f0, cfg)
    cache = cache or _GainCache(cfg)
    picard = picard or gain_only_solve(f0, cfg, cache)
    g1 = picard.trajectory.values
    zero = np.zeros_like(g1)
    scale = float(np.max(g1)) or 1.0
    g2_calc = damped_linear_step(cache.gain_traj(g1, g1), zero, f0, cfg)
    disc = float(np.max(np.abs(g2_calc - g1))) / scale
    g2 = g1
    h2 = damped_linear_step(zero, cache.loss_traj(g1), f0, cfg)
    begin = {
        "h1>=0": True,
        "h2-h1": _check_order("h_1 <= h_2", h2, scale, 2),
        "g2-h2": _check_order("h_2 <= g_2", g2 - h2, scale, 2),
        "g1-g2": 0.0,
        "g2_equals_g1_bitwise": bool(np.array_equal(g2, g1)),
    }
    gap1 = _gap_norm(cfg, g1)
    states = [IterationState(1, g1, zero, 0.0, 0.0, float(np.min(g1)) / scale, gap1, None)]
    states.append(IterationState(2, g2, h2, 0.0, begin["h2-h1"], begin["g2-h2"], _gap_norm(cfg, g2 - h2),
                                 None))
    states[-1] = replace(states[-1], ratio=states[-1].gap / gap1 if gap1 > 0 else None)
    g, h = _bracket_loop(g2, h2, f0, cfg, cache, scale, 2, states)
    mid = 0.5 * (g + h)
    limit = _traj(cfg, mid, {"kind": "ks-limit", "gap": states[-1].gap})
    res = KsResult(states, limit, states[-1].gap, picard, disc, begin)
    if probe_uniqueness:
        res.uniqueness = uniqueness_probe(f0, cfg, res, cache)
    return res


def uniqueness_probe(f0: PhaseSpaceField, cfg: SolveConfig, first: KsResult, cache: _GainCache) -> dict:
    """Second bracket from g_1' = f_+ and h_1' = h_2 / 2.

    Monotonicity of every map gives h_1' <= h_2 <= h_2' and g_2' <= g_1, so the
    beginning condition holds, while g_2' = g_1 no longer does and the run
    follows a different path. The two limits should agree to within twice
    the final gap.
    """
    g1 = first.picard.trajectory.values
    scale = float(np.max(g1)) or 1.0
    h1 = 0.5 * first.states[1].h
    states = [IterationState(1, g1, h1, 0.0, 0.0, _check_order("h_1' <= g_1'", g1 - h1, scale, 1),
                             _gap_norm(cfg, g1 - h1), None)]
    g, h = _bracket_loop(g1, h1, f0, cfg, cache, scale, 1, states)
    other = 0.5 * (g + h)
    diff = _gap_norm(cfg, other - first.limit.values)
    bound = 2.0 * max(first.gap, states[-1].gap)
    return {"difference": diff, "bound": bound, "ok": bool(diff <= bound), "iterations": states[-1].n,
            "gaps": [s.gap for s in states]}


def mass_history(traj: Trajectory) -> np.ndarray:
    return traj.masses()


def mass_drift_check(traj: Trajectory, budget: float = 1e-2, factor: float = 3.0) -> dict:
    """|m(t) - m(0)| against factor * budget * int_0^t m(s)^2 ds.

    A conservative collision step changes mass by at most budget * (int f)^2
    per unit time, so the drift is compared with the accumulated allowance.
    """
    m = traj.masses()
    t = traj.times
    allowance = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(t) * (m[1:] ** 2 + m[:-1] ** 2))])
    drift = np.abs(m - m[0])
    lim = factor * budget * allowance
    ok = bool(np.all(drift <= lim + 1e-300))
    return {"masses": m, "drift": drift, "allowance": lim, "ok": ok,
            "max_relative_drift": float(np.max(drift) / m[0]) if m[0] else 0.0}


def scattering_probe(traj: Trajectory, slack: float = 1e-3) -> dict:
    """B(t) = U(-t) f(t) on the time grid, f_inf = B(T), residuals ||B(t_i) - B(T)||_3.

    B is evaluated in the form B(t) = f(0) + U(-t)[f(t) - U(t) f(0)], which is
    identical in exact arithmetic but keeps the interpolation round trip
    U(-t) U(t) away from the free part; otherwise the O(h_x^2) smoothing of
    the O(eta) free flow would swamp the O(eta^2) collision signal.
    """
    sp, gr = traj.space, traj.grid
    f0 = traj.values[0]
    B = np.empty_like(traj.values)
    for i, t in enumerate(traj.times):
        B[i] = f0 + shift_array(traj.values[i] - shift_array(f0, sp, gr, t), sp, gr, -t)
    vol = gr.cell_volume * sp.h_x
    res = np.array([float(lp_sum(B[i] - B[-1], 3.0, vol)) for i in range(traj.n_t)])
    inc = np.diff(res)
    monotone = bool(np.all(inc <= slack * res[0]))
    half = int(np.argmin(np.abs(traj.times - 0.5 * traj.times[-1])))
    return {
        "f_inf": B[-1], "residuals": res, "monotone": monotone,
        "half_ratio": float(res[half] / res[0]) if res[0] > 0 else 0.0,
        "half_index": half,
    }


def calibrate_eta(cfg: SolveConfig, target: float = 0.5, lo: float = 1e-4, hi: float = 10.0,
                  steps: int = 8, probe_iter: int = 3, **data_kw) -> dict:
    """Bisection (in log eta) for the amplitude at which the measured Picard
    contraction factor reaches ``target``; divergence counts as too large."""
    history = []

    def factor(eta):
        c = replace(cfg, eta=eta)
        try:
            r = gain_only_solve(initial_data(c, **data_kw), c, max_iter=probe_iter, tol=0.0)
        except ConvergenceError as exc:
            d = exc.history
            return d[-1] / d[-2] if len(d) >= 2 and d[-2] > 0 else 0.0
        except DivergenceError as exc:
            return max(exc.factor, target * 1.0001)
        return r.contraction

    for _ in range(steps):
        mid = math.sqrt(lo * hi)
        fac = factor(mid)
        history.append((mid, fac))
        if fac < target:
            lo = mid
        else:
            hi = mid
    return {"eta_threshold": lo, "upper": hi, "history": history}
