"""Empirical lab for weighted Hardy-Littlewood-Sobolev bounds on the gain term.

Every probe evaluates ratios of the form

    ||<v>^ell Q+(f, g)||_r / (||<v>^ell f||_p ||<v>^ell g||_q)

over a declared, finite, seeded family of inputs and reports the spread.
Nothing here proves a bound; the probes only sample it.

Test inputs are Gaussian mixtures described analytically, so dilations and
translations act on the parameters and the samples stay exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .collision import CollisionKernel, gain_array, translated_radon_apply
from .errors import DomainError, RangeError
from .exponents import HlsExponents, check_hls_scaling
from .grids import DistributionField, VelocityGrid
from .norms import lp_sum
from .quadrature import HemisphereQuadrature


# --------------------------------------------------------------------------- families

@dataclass(frozen=True)
class GaussianMixture:
    """sum_k w_k exp(-|v - c_k|^2 / (2 sigma_k^2))."""
    weights: tuple
    centers: tuple
    sigmas: tuple

    def __post_init__(self):
        k = len(self.weights)
        if k == 0 or len(self.centers) != k or len(self.sigmas) != k:
            raise DomainError("mixture needs matching, non-empty component lists")
        if any(s <= 0 for s in self.sigmas) or any(w < 0 for w in self.weights):
            raise DomainError("mixture needs positive widths and non-negative weights")

    @classmethod
    def single(cls, center=(0.0, 0.0, 0.0), sigma: float = 1.0, weight: float = 1.0):
        return cls((float(weight),), (tuple(float(c) for c in center),), (float(sigma),))

    @property
    def radius(self) -> float:
        """Declared radius: the smallest ball about 0 holding every one-sigma ball."""
        return max(float(np.linalg.norm(c)) + s for c, s in zip(self.centers, self.sigmas))

    def sample(self, grid: VelocityGrid) -> DistributionField:
        X, Y, Z = grid.mesh()
        out = np.zeros_like(X)
        for w, c, s in zip(self.weights, self.centers, self.sigmas):
            d2 = (X - c[0]) ** 2 + (Y - c[1]) ** 2 + (Z - c[2]) ** 2
            out += w * np.exp(-d2 / (2.0 * s * s))
        return DistributionField(grid, out, nonnegative=True)

    def dilate(self, lam: float) -> "GaussianMixture":
        """Parameters of v -> f(lam v)."""
        return GaussianMixture(self.weights, tuple(tuple(x / lam for x in c) for c in self.centers),
                               tuple(s / lam for s in self.sigmas))

    def translate(self, shift) -> "GaussianMixture":
        """Parameters of v -> f(v - shift)."""
        return GaussianMixture(self.weights, tuple(tuple(x + float(d) for x, d in zip(c, shift))
                                                   for c in self.centers), self.sigmas)


@dataclass
class TestFamily:
    name: str
    members: list
    labels: list = field(default_factory=list)

    @property
    def radius(self) -> float:
        return max(m.radius for pair in self.members for m in (pair if isinstance(pair, tuple) else (pair,)))

    def check_grid(self, grid: VelocityGrid) -> None:
        if grid.R < 4.0 * self.radius - 1e-12:
            raise RangeError(f"family {self.name!r} has radius {self.radius:.3g}; grid needs R >= 4x that")


def random_mixture(rng: np.random.Generator, max_center: float = 0.6,
                   sigma_range=(0.5, 0.9), max_components: int = 3) -> GaussianMixture:
    k = int(rng.integers(1, max_components + 1))
    w, c, s = [], [], []
    for _ in range(k):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        c.append(tuple(float(x) for x in d * rng.uniform(0.0, max_center)))
        s.append(float(rng.uniform(*sigma_range)))
        w.append(float(rng.uniform(0.5, 1.5)))
    return GaussianMixture(tuple(w), tuple(c), tuple(s))


def mixture_pair_family(seed: int, count: int = 20, **kw) -> TestFamily:
    """Seeded pairs (f, g) of Gaussian mixtures; radius <= 1.5 with the defaults."""
    rng = np.random.default_rng(seed)
    pairs = [(random_mixture(rng, **kw), random_mixture(rng, **kw)) for _ in range(count)]
    return TestFamily(f"mixture-pairs(seed={seed})", pairs, [f"pair{i:02d}" for i in range(count)])


def shifted_gaussian_family(norms=(0, 1, 2, 3, 4, 5), direction=(1.0, 0.0, 0.0), sigma: float = 1.0) -> TestFamily:
    d = np.asarray(direction, dtype=float)
    d /= np.linalg.norm(d)
    members = [GaussianMixture.single(tuple(float(x) for x in k * d), sigma) for k in norms]
    return TestFamily("shifted-gaussians", members, [f"|v0|={k}" for k in norms])


# --------------------------------------------------------------------------- ratios

def _norm(values: np.ndarray, grid: VelocityGrid, weight, p) -> float:
    return float(lp_sum(values * weight, float(p), grid.cell_volume))


def _as_float(x) -> float:
    return math.inf if x == 0 else 1.0 / float(x)


@dataclass
class RatioReport:
    ratio: float
    numerator: float
    norm_f: float
    norm_g: float
    exponents: HlsExponents
    status: str

    def row(self) -> dict:
        e = self.exponents
        return {"p": str(e.p), "q": str(e.q), "r": str(e.r), "gamma": str(e.gamma), "ell": str(e.ell),
                "delta": str(e.delta), "status": self.status, "ratio": self.ratio}


def ratio_from_gain(qp: np.ndarray, f: np.ndarray, g: np.ndarray, grid: VelocityGrid,
                    e: HlsExponents, weight=None) -> RatioReport:
    """Ratio for a precomputed Q+(f, g); ``weight`` defaults to <v>^ell on the grid."""
    if weight is None:
        weight = grid.bracket(float(e.ell)) if e.ell else 1.0
    num = _norm(qp, grid, weight, _as_float(e.ir))
    nf = _norm(f, grid, weight, _as_float(e.ip))
    ng = _norm(g, grid, weight, _as_float(e.iq))
    if nf == 0 or ng == 0:
        raise DomainError("zero denominator in HLS ratio")
    return RatioReport(num / (nf * ng), num, nf, ng, e, check_hls_scaling(e).status)


def estimate_ratio(f: DistributionField, g: DistributionField, e: HlsExponents, kernel: CollisionKernel,
                   squad: HemisphereQuadrature, **gain_kw) -> RatioReport:
    """||<v>^ell Q+(f,g)||_r / (||<v>^ell f||_p ||<v>^ell g||_q) on the grid of f.

    Non-admissible exponents are allowed (for violation sweeps); the verdict is
    carried in ``status``.
    """
    if f.grid != g.grid:
        raise DomainError("f and g live on different grids")
    if not np.any(f.values) or not np.any(g.values):
        raise DomainError("zero denominator in HLS ratio")
    qp = gain_array(f.values, g.values, f.grid, kernel, squad, **gain_kw)
    return ratio_from_gain(qp, f.values, g.values, f.grid, e)


def _slope(lams, ratios):
    return float(np.polyfit(np.log(lams), np.log(ratios), 1)[0])


@dataclass
class SweepResult:
    lambdas: list
    ratios: dict          # exponent label -> list of ratios
    slopes: dict          # exponent label -> slope (None when degenerate)
    expected: dict        # exponent label -> 3 delta
    mode: str


def _label(e: HlsExponents) -> str:
    return f"p={e.p},q={e.q},r={e.r}"


def scaling_sweep(f: GaussianMixture, g: GaussianMixture, exps, kernel: CollisionKernel,
                  squad: HemisphereQuadrature, grid: VelocityGrid, lambdas=(0.5, 1, 2, 4),
                  mode: str = "dilate", **gain_kw) -> SweepResult:
    """Log-log slope of the HLS ratio under f -> f(lam v), g -> g(lam v).

    The expected slope is 3 delta with delta = 1/p + 1/q - 1 - 1/r - gamma/3,
    from Q+(f_lam, g_lam)(v) = lam^(-3-gamma) Q+(f, g)(lam v).

    ``mode="dilate"`` evaluates each lam on the grid with extent R/lam, so the
    samples of f_lam coincide with those of f and the discrete operator obeys
    the identity exactly; the slope then checks the norm and exponent
    bookkeeping. ``mode="fixed"`` resamples f_lam on the fixed grid and also
    feels the resolution error; a range error is raised when a dilated input
    no longer fits in the box.
    """
    if isinstance(exps, HlsExponents):
        exps = [exps]
    lambdas = [float(x) for x in lambdas]
    if any(e.ell != 0 for e in exps):
        raise DomainError("scaling sweep needs ell = 0 (dilation breaks the weight)")
    if len(set(lambdas)) != len(lambdas) or any(x <= 0 for x in lambdas):
        raise DomainError("lambda values must be distinct and positive")
    if len(lambdas) not in (1,) and len(lambdas) < 4:
        raise DomainError("slope fit needs at least 4 lambda values")
    if mode not in ("dilate", "fixed"):
        raise DomainError(f"unknown sweep mode {mode!r}")
    ratios = {_label(e): [] for e in exps}
    for lam in lambdas:
        fl, gl = f.dilate(lam), g.dilate(lam)
        if mode == "dilate":
            gr = grid.dilated(lam)
        else:
            gr = grid
            if max(fl.radius, gl.radius) > grid.R:
                raise RangeError(f"lambda = {lam} pushes the input outside the box")
        fv, gv = fl.sample(gr).values, gl.sample(gr).values
        qp = gain_array(fv, gv, gr, kernel, squad, **gain_kw)
        for e in exps:
            ratios[_label(e)].append(ratio_from_gain(qp, fv, gv, gr, e).ratio)
    slopes = {k: (None if len(lambdas) == 1 else _slope(lambdas, v)) for k, v in ratios.items()}
    expected = {_label(e): 3.0 * float(e.delta) for e in exps}
    return SweepResult(lambdas, ratios, slopes, expected, mode)


@dataclass
class MomentReport:
    norms: list
    ratios: list
    spread: float
    comparator_ratios: list
    comparator_trend: str
    exponents: HlsExponents
    comparator: HlsExponents


def _trend(x) -> str:
    d = np.diff(x)
    if np.all(d > 0):
        return "increasing"
    if np.all(d < 0):
        return "decreasing"
    return "mixed"


def moment_probe(gamma, ell, kernel: CollisionKernel, squad: HemisphereQuadrature, grid: VelocityGrid,
                 norms=(0, 1, 2, 3, 4, 5), direction=(1.0, 0.0, 0.0), sigma: float = 1.0,
                 ir=Fraction(1, 6), comparator_ip=None, **gain_kw) -> MomentReport:
    """Equal-weight ratio over Gaussians centred at |v0| e for |v0| in ``norms``.

    Q+ commutes with translations (it only sees relative velocities), so
    Q+(f(. - c), f(. - c)) is the translate of Q+(f, f). The probe therefore
    computes Q+ once on a grid centred on the Gaussian and evaluates the
    weights <v + c>^ell there (a co-moving grid). No grid extent limits the
    centre.

    The primary exponents obey the HLS relation 1/p = 1/q = (1 + 1/r + gamma/3)/2.
    The comparator keeps the same weights but uses the convolution relation
    1/p + 1/q = 1 + 1/r.
    """
    gamma = Fraction(gamma)
    ell = Fraction(ell)
    ir = Fraction(ir)
    if not (0 < gamma <= 1):
        raise DomainError("moment probe needs gamma in (0, 1]")
    ip = (1 + ir + gamma / 3) / 2
    e = HlsExponents(ip, ip, ir, gamma, ell)
    cip = Fraction(comparator_ip) if comparator_ip is not None else (1 + ir) / 2
    cmp_e = HlsExponents(cip, 1 + ir - cip, ir, gamma, ell)
    base = GaussianMixture.single((0.0, 0.0, 0.0), sigma).sample(grid).values
    qp = gain_array(base, base, grid, kernel, squad, **gain_kw)
    d = np.asarray(direction, dtype=float)
    d /= np.linalg.norm(d)
    X, Y, Z = grid.mesh()
    ratios, cmp = [], []
    for k in norms:
        c = k * d
        w = (1.0 + (X + c[0]) ** 2 + (Y + c[1]) ** 2 + (Z + c[2]) ** 2) ** (0.5 * float(ell))
        ratios.append(ratio_from_gain(qp, base, base, grid, e, w).ratio)
        cmp.append(ratio_from_gain(qp, base, base, grid, cmp_e, w).ratio)
    return MomentReport(list(norms), ratios, max(ratios) / ratios[0], cmp, _trend(cmp), e, cmp_e)


@dataclass
class TranslationReport:
    v_stars: list
    ratios: list
    baseline: float
    sup: float
    in_theorem_range: bool
    tail_integrable: bool


def translation_probe(h: DistributionField, ip, gamma, v_stars, kernel: CollisionKernel,
                      squad: HemisphereQuadrature) -> TranslationReport:
    """sup over v_* of ||tau_{-v_*} T tau_{v_*} h||_p / ||h||_{p~}, 1/p~ = 1/p + gamma/3.

    For data that does not vanish near the sphere through v_*, the output
    decays exactly like |v - v_*|^(gamma - 2) (with b = cos theta the weighted
    hemisphere measure is area on the sphere with diameter [v_*, v] divided
    by |v - v_*|^2). Its L^p norm on the whole space is therefore finite only
    for 1/p < (2 - gamma)/3; outside that window the probe measures a norm
    truncated to the box, which ``tail_integrable`` flags.
    """
    ip = Fraction(ip)
    gamma = Fraction(gamma)
    if kernel.gamma != float(gamma):
        raise DomainError("kernel exponent and probe gamma differ")
    ipt = ip + gamma / 3
    if not (0 < ip < 1 and 0 < ipt <= 1):
        raise DomainError("exponents outside (1, inf)")
    if gamma == 0:
        in_range = 0 < ip < 1
    else:
        in_range = gamma / 2 <= ip <= 1 - gamma / 2
    den = float(lp_sum(h.values, 1.0 / float(ipt), h.grid.cell_volume))
    if den == 0:
        raise DomainError("h = 0: zero denominator")
    ratios = []
    for vs in v_stars:
        out = translated_radon_apply(h, vs, kernel, squad)
        ratios.append(float(lp_sum(out.values, 1.0 / float(ip), h.grid.cell_volume)) / den)
    zero = [i for i, vs in enumerate(v_stars) if not np.any(np.asarray(vs, dtype=float))]
    if zero:
        base = ratios[zero[0]]
    else:
        out = translated_radon_apply(h, (0.0, 0.0, 0.0), kernel, squad)
        base = float(lp_sum(out.values, 1.0 / float(ip), h.grid.cell_volume)) / den
    return TranslationReport([tuple(map(float, v)) for v in v_stars], ratios, base, max(ratios),
                             bool(in_range), bool(ip < (2 - gamma) / 3))
