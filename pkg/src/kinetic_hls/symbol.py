"""Oscillatory symbol of the hemisphere Radon transform and its asymptotics.

    A(x, xi) = |x|^gamma * int_{S^2_+(x)} exp(-i (x.w)(xi.w)) cos(theta) dw,
    a(x, xi) = A(x, xi) |xi|^gamma,

where the hemisphere is taken about x and cos(theta) = x.w / |x|. With
s = |x||xi| and theta0 the angle between x and xi, three evaluation routes are
provided:

* :func:`symbol_A` - the product hemisphere rule (what the collision code
  uses), guarded by a node-count rule;
* :func:`symbol_A_reduced` - the azimuth integrated analytically,
  A = 2 pi |x|^gamma int_0^1 mu exp(-i s mu^2 cos theta0)
  J0(s mu sqrt(1-mu^2) sin theta0) dmu, evaluated in t = arcsin(mu) on
  composite Gauss-Legendre panels;
* :func:`symbol_A_closed` - the closed form
  A = pi |x|^gamma exp(-i x.xi / 2) sin(s/2) / (s/2).

The closed form follows because cos(theta) dw is the pushforward of area on the
sphere with diameter [0, x]; the reduced route is an independent check of it.
Stationary phase at the two critical directions w_pm ~ x/|x| pm xi/|xi| gives
a = c1 exp(-i s sigma_+) s^(gamma-1) + c2 exp(-i s sigma_-) s^(gamma-1) with
c1 = i pi, c2 = -i pi (amplitude cos(theta0/2) at w_+ over the Hessian factor
2 cos(theta0/2), and likewise with sines at w_-), and the closed form shows the
two-term expression is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import j0

from .errors import DomainError, ResolutionError
from .quadrature import HemisphereQuadrature, build_hemisphere_quadrature, rotation_to

C1 = 1j * math.pi
C2 = -1j * math.pi
Z_DEFAULT = 8
REGION_I_FACTOR = 64
REGION_II_FACTOR = 512


@dataclass(frozen=True)
class PhasePoint:
    x: tuple
    xi: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "xi", tuple(float(v) for v in self.xi))
        if len(self.x) != 3 or len(self.xi) != 3:
            raise DomainError("x and xi must be 3-vectors")

    @classmethod
    def from_invariants(cls, s: float, theta0: float, r: float = 1.0) -> "PhasePoint":
        """Point with |x| = r along e_3 and xi at angle theta0 in the (e_1, e_3) plane."""
        if s <= 0 or r <= 0:
            raise DomainError("s and |x| must be positive")
        k = s / r
        return cls((0.0, 0.0, r), (k * math.sin(theta0), 0.0, k * math.cos(theta0)))

    @property
    def xn(self) -> float:
        return float(np.linalg.norm(self.x))

    @property
    def xin(self) -> float:
        return float(np.linalg.norm(self.xi))

    @property
    def s(self) -> float:
        return self.xn * self.xin

    @property
    def theta0(self) -> float:
        if self.xn == 0 or self.xin == 0:
            raise DomainError("theta0 undefined when x or xi vanishes")
        c = float(np.dot(self.x, self.xi)) / (self.xn * self.xin)
        return math.acos(max(-1.0, min(1.0, c)))


def _prefactor(xn: float, gamma: float) -> float:
    if xn == 0:
        return 1.0 if gamma == 0 else 0.0
    return xn ** gamma


def resolution_ok(squad: HemisphereQuadrature, s: float) -> bool:
    """Node-count rule n_mu * n_phi >= 40 sqrt(s)."""
    return squad.n_mu * squad.n_phi >= 40.0 * math.sqrt(max(s, 0.0))


def symbol_A(pt: PhasePoint, squad: HemisphereQuadrature, gamma: float = 0.0) -> complex:
    """A(x, xi) by the product hemisphere rule oriented along x.

    Raises :class:`ResolutionError` when the node-count rule fails. The rule is
    necessary, not sufficient: the phase spans about s radians, so accurate
    values for large s need more nodes than the rule demands.
    """
    x = np.asarray(pt.x)
    xi = np.asarray(pt.xi)
    xn = pt.xn
    pre = _prefactor(xn, gamma)
    if xn == 0:
        return complex(math.pi * pre)
    if not resolution_ok(squad, pt.s):
        raise ResolutionError(
            f"n_mu*n_phi = {squad.n_mu * squad.n_phi} < 40*sqrt(s) = {40 * math.sqrt(pt.s):.1f}")
    om = squad.nodes @ rotation_to(x).T
    phase = (om @ x) * (om @ xi)
    return complex(pre * np.sum(squad.cos_weights * np.exp(-1j * phase)))


@lru_cache(maxsize=64)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def symbol_A_reduced(pt: PhasePoint, gamma: float = 0.0, nodes_per_panel: int = 24,
                     panels: int | None = None) -> complex:
    """A(x, xi) with the azimuth integrated exactly (Bessel J0) and composite
    Gauss-Legendre in mu; the panel count grows with s so every panel spans
    well under one oscillation."""
    xn = pt.xn
    pre = _prefactor(xn, gamma)
    if xn == 0 or pt.xin == 0:
        return complex(math.pi * pre)
    s = pt.s
    th = pt.theta0
    # mu = sin(t) removes the square-root endpoint singularity at mu = 1
    if panels is None:
        panels = max(4, int(math.ceil(s * math.pi / 4.0)))
    x, w = _gl(nodes_per_panel)
    edges = np.linspace(0.0, 0.5 * math.pi, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    t = (0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)).ravel()
    wt = (0.5 * (hi - lo) * w[None, :]).ravel()
    mu = np.sin(t)
    f = 0.5 * np.sin(2 * t) * np.exp(-1j * s * mu * mu * math.cos(th)) * j0(0.5 * s * np.sin(2 * t) * math.sin(th))
    return complex(2.0 * math.pi * pre * np.sum(wt * f))


def symbol_A_closed(pt: PhasePoint, gamma: float = 0.0) -> complex:
    """Closed form pi |x|^gamma exp(-i x.xi/2) sinc(s/2)."""
    pre = _prefactor(pt.xn, gamma)
    s = pt.s
    half = 0.5 * s
    sinc = math.sin(half) / half if half != 0 else 1.0
    return complex(math.pi * pre * np.exp(-0.5j * float(np.dot(pt.x, pt.xi))) * sinc)


def symbol_a(pt: PhasePoint, gamma: float = 0.0, method: str = "reduced", squad=None) -> complex:
    """a(x, xi) = A(x, xi) |xi|^gamma by the chosen route."""
    if method == "reduced":
        A = symbol_A_reduced(pt, gamma)
    elif method == "closed":
        A = symbol_A_closed(pt, gamma)
    elif method == "hemisphere":
        A = symbol_A(pt, squad, gamma)
    else:
        raise DomainError(f"unknown symbol method {method!r}")
    xin = pt.xin
    return A * (xin ** gamma if gamma else 1.0)


# --------------------------------------------------------------------------- partition of unity

def _g(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m])
    return out


def smooth_step(t):
    """C-infinity step: 1 for t <= 0, 0 for t >= 1."""
    a = _g(1.0 - np.asarray(t, dtype=float))
    b = _g(np.asarray(t, dtype=float))
    return a / (a + b)


# The logarithmic step runs over [margin, 2 - margin] octaves above the base
# point, so that zeta and rho are supported strictly inside their intervals.
_MARGIN = 0.05


def _log_step(t, base):
    u = np.log2(np.asarray(t, dtype=float) / base)
    return smooth_step((u - _MARGIN) / (1.0 - 2.0 * _MARGIN))


def psi(theta):
    """1 below pi/8 (plus margin), 0 above pi/4 (minus margin)."""
    return _log_step(theta, math.pi / 8)


def zeta(theta):
    """Angular bump supported in (pi/8, pi/2); sum_z zeta(2^-z theta) = 1."""
    theta = np.asarray(theta, dtype=float)
    return psi(theta / 2.0) - psi(theta)


def zeta_z(z: int, theta):
    """Cone cutoffs: zeta_n(theta) = zeta(2^n theta) for n >= 1, zeta_0 = 1 - psi
    reflected about pi/2, zeta_{-n}(theta) = zeta_n(pi - theta)."""
    theta = np.asarray(theta, dtype=float)
    if z == 0:
        t = np.minimum(theta, math.pi - theta)
        return 1.0 - psi(t)
    if z > 0:
        return zeta(2.0 ** z * theta)
    return zeta(2.0 ** (-z) * (math.pi - theta))


def rho(r):
    """Radial bump supported in (4, 16) with sum_k rho(2^-k r) = 1."""
    r = np.asarray(r, dtype=float)
    return _log_step(r / 2.0, 4.0) - _log_step(r, 4.0)


def rho_k(k: int, r):
    return rho(2.0 ** (-k) * np.asarray(r, dtype=float))


def cone_bounds(z: int) -> tuple:
    """Open angular interval of the cone Lambda_z."""
    if z == 0:
        return math.pi / 8, math.pi - math.pi / 8
    n = abs(z)
    lo, hi = math.pi / 2 ** (n + 3), math.pi / 2 ** (n + 1)
    return (lo, hi) if z > 0 else (math.pi - hi, math.pi - lo)


def in_cone(theta0: float, z: int) -> bool:
    lo, hi = cone_bounds(z)
    return lo < theta0 < hi


@dataclass
class DyadicPartition:
    Z: int = Z_DEFAULT

    def zetas(self, theta):
        return {z: zeta_z(z, theta) for z in range(-self.Z, self.Z + 1)}

    def zeta_sum(self, theta):
        return sum(self.zetas(theta).values())

    def rho_sum(self, r, kmin: int, kmax: int):
        return sum(rho_k(k, r) for k in range(kmin, kmax + 1))


def partition_check(part: DyadicPartition | None = None, thetas=None, radii=None) -> dict:
    """Deviation of the partition sums from 1 and support containment in the cones."""
    part = part or DyadicPartition()
    if thetas is None:
        lim = math.pi / 2 ** (part.Z + 2)   # angles beyond the Z-th cone are excluded
        thetas = np.linspace(lim, math.pi - lim, 4001)
    thetas = np.asarray(thetas, dtype=float)
    if radii is None:
        radii = np.geomspace(1e-3, 1e3, 4001)
    radii = np.asarray(radii, dtype=float)
    if np.any(thetas <= 0) or np.any(thetas >= math.pi) or np.any(radii <= 0):
        raise DomainError("lattice must avoid theta0 in {0, pi} and |x| = 0")
    zs = part.zetas(thetas)
    zdev = float(np.max(np.abs(sum(zs.values()) - 1.0)))
    kmin = int(math.floor(math.log2(radii.min()))) - 4
    kmax = int(math.ceil(math.log2(radii.max()))) + 1
    rdev = float(np.max(np.abs(part.rho_sum(radii, kmin, kmax) - 1.0)))
    contained = {}
    for z, vals in zs.items():
        lo, hi = cone_bounds(z)
        supp = thetas[vals > 0]
        contained[z] = bool(supp.size == 0 or (supp.min() > lo and supp.max() < hi))
    rsupp = np.geomspace(1, 32, 20001)
    rs = rsupp[rho(rsupp) > 0]
    return {
        "zeta_deviation": zdev,
        "rho_deviation": rdev,
        "zeta_supports_in_cones": contained,
        "rho_support": (float(rs.min()), float(rs.max())),
        "rho_support_ok": bool(rs.min() > 4 and rs.max() < 16),
    }


def region_classify(pt: PhasePoint, z: int) -> set:
    """{'I'}, {'II'} or both, for a point in the cone Lambda_z."""
    th = pt.theta0
    if not in_cone(th, z):
        raise DomainError(f"theta0 = {th:.6g} outside cone Lambda_{z}")
    s = pt.s
    out = set()
    if s >= REGION_I_FACTOR * 4 ** abs(z):
        out.add("I")
    if s <= REGION_II_FACTOR * 4 ** abs(z):
        out.add("II")
    return out


def active_cones(theta0: float, Z: int = Z_DEFAULT) -> list:
    """Cones whose cutoff zeta_z is non-zero at theta0."""
    return [z for z in range(-Z, Z + 1) if float(zeta_z(z, theta0)) > 0]


def in_region_I(pt: PhasePoint, Z: int = Z_DEFAULT) -> bool:
    zs = active_cones(pt.theta0, Z)
    return bool(zs) and all("I" in region_classify(pt, z) for z in zs)


def in_region_II(pt: PhasePoint, Z: int = Z_DEFAULT) -> bool:
    zs = active_cones(pt.theta0, Z)
    return bool(zs) and all("II" in region_classify(pt, z) for z in zs)


# --------------------------------------------------------------------------- principal symbol

FORMS = ("derived", "paper")


def principal_parts(pt: PhasePoint, gamma: float, form: str = "derived", c=(C1, C2)) -> tuple:
    """The two stationary-phase terms (p_+, p_-) including constants and phases.

    ``form="derived"`` uses unit amplitudes with c1 = i pi, c2 = -i pi (the
    values from the stationary-phase formula). ``form="paper"`` uses the
    amplitudes sin(theta0/2), cos(theta0/2) with caller-supplied constants;
    it is kept for comparison only (no constant pair makes it match a).
    """
    s = pt.s
    th = pt.theta0
    sp = 0.5 * (math.cos(th) + 1.0)
    sm = 0.5 * (math.cos(th) - 1.0)
    if form == "derived":
        ap, am = 1.0, 1.0
    elif form == "paper":
        ap, am = math.sin(th / 2), math.cos(th / 2)
    else:
        raise DomainError(f"unknown principal form {form!r}")
    base = s ** (gamma - 1.0)
    return (c[0] * np.exp(-1j * s * sp) * ap * base, c[1] * np.exp(-1j * s * sm) * am * base)


def principal_symbol(pt: PhasePoint, gamma: float = 0.0, form: str = "derived", c=(C1, C2),
                     Z: int = Z_DEFAULT) -> complex:
    """Two-term stationary-phase approximation of a(x, xi) on region I."""
    if not in_region_I(pt, Z):
        raise DomainError("principal symbol requested outside region I")
    p, m = principal_parts(pt, gamma, form, c)
    return complex(p + m)


def fit_constants(theta0: float, s_values, gamma: float, form: str = "derived", method: str = "reduced") -> dict:
    """Least-squares (c1, c2) on a ray against quadrature values of a."""
    s_values = np.asarray(s_values, dtype=float)
    rows, rhs = [], []
    for s in s_values:
        pt = PhasePoint.from_invariants(float(s), theta0)
        p, m = principal_parts(pt, gamma, form, (1.0, 1.0))
        rows.append([p, m])
        rhs.append(symbol_a(pt, gamma, method))
    A = np.array(rows, dtype=complex)
    b = np.array(rhs, dtype=complex)
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = np.linalg.norm(A @ c - b) / max(np.linalg.norm(b), 1e-300)
    return {"c1": complex(c[0]), "c2": complex(c[1]), "relative_misfit": float(resid)}


def _loglog_slope(s, r):
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    m = r > 0
    if m.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(s[m]), np.log(r[m]), 1)[0])


def asymptotic_residual(theta0: float, s_values, gamma: float, method: str = "reduced",
                        floor_rel: float = 1e-9, Z: int = Z_DEFAULT) -> dict:
    """Residual |a - principal| along a ray and its fitted log-log decay slope.

    When every residual sits below ``floor_rel`` times the principal amplitude
    2 pi s^(gamma-1), the remainder is indistinguishable from quadrature
    round-off; the slope is then reported as -inf with ``status="below-floor"``
    (and the raw slope of the round-off is still returned).
    """
    s_values = np.asarray(s_values, dtype=float)
    if s_values.size < 2 or s_values.max() / s_values.min() < 100 * (1 - 1e-12):
        raise DomainError("s list must span at least two decades")
    rows = []
    for s in s_values:
        pt = PhasePoint.from_invariants(float(s), theta0)
        if not in_region_I(pt, Z):
            raise DomainError(f"s = {s} on theta0 = {theta0} is not in region I")
        a = symbol_a(pt, gamma, method)
        pr = principal_symbol(pt, gamma, Z=Z)
        rows.append((float(s), a, pr, abs(a - pr)))
    res = np.array([r[3] for r in rows])
    amp = 2 * math.pi * s_values ** (gamma - 1.0)
    raw = _loglog_slope(s_values, res)
    below = bool(np.all(res <= floor_rel * amp))
    return {
        "theta0": theta0, "gamma": gamma, "method": method,
        "rows": rows,
        "slope": float("-inf") if below else raw,
        "raw_slope": raw,
        "status": "below-floor" if below else "fitted",
        "bound": gamma - 2.0 + 0.2,
        "principal_slope": _loglog_slope(s_values, amp),
        "max_relative_residual": float(np.max(res / amp)),
    }


def region2_magnitude(pt: PhasePoint, gamma: float = 0.0, method: str = "reduced", Z: int = Z_DEFAULT):
    """|a| / (sin theta0 cos theta0 s^(gamma-1)); None for excluded samples."""
    th = pt.theta0
    if not in_region_II(pt, Z):
        raise DomainError("point is not in region II")
    den = math.sin(th) * math.cos(th)
    if abs(den) < 1e-12:
        return None
    return abs(symbol_a(pt, gamma, method)) / (abs(den) * pt.s ** (gamma - 1.0))


def region2_sweep(thetas, s_values, gamma: float = 0.0, method: str = "reduced") -> dict:
    """Ratio samples over region II and the smallest band [1/c, c] containing them."""
    vals = []
    for th in thetas:
        for s in s_values:
            pt = PhasePoint.from_invariants(float(s), float(th))
            if not in_region_II(pt):
                continue
            r = region2_magnitude(pt, gamma, method)
            if r is not None:
                vals.append((float(th), float(s), r))
    rs = np.array([v[2] for v in vals])
    lo, hi = float(rs.min()), float(rs.max())
    c = max(hi, 1.0 / lo) if lo > 0 else float("inf")
    return {"samples": vals, "min": lo, "max": hi, "band_c": c}
