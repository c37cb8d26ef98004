"""Exact rational bookkeeping for the HLS and kinetic-transport exponent relations.

Exponents are handled through their reciprocals, stored as
:class:`fractions.Fraction`; an infinite exponent is the reciprocal 0. Nothing
in this module touches floating point except :func:`as_fraction` applied to a
float, which converts the binary value exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    """Parse an exact rational: Fraction, int, float (exact binary value), or a
    string such as ``"3/2"``, ``"0.25"`` or ``"inf"``. ``inf`` is not a Fraction,
    use :func:`recip` for exponents that may be infinite."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"{x} is not a finite rational")
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse rational {x!r}") from exc
    raise DomainError(f"cannot interpret {x!r} as a rational")


def recip(x) -> Fraction:
    """Reciprocal of an exponent given as a number or string; ``inf`` maps to 0."""
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo"):
        return ZERO
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return ZERO
    v = as_fraction(x)
    if v <= 0:
        raise DomainError(f"exponent must be positive, got {x}")
    return 1 / v


def from_recip(r: Fraction):
    """Exponent from its reciprocal (0 gives ``math.inf``)."""
    return math.inf if r == 0 else 1 / r


def fmt_exp(r: Fraction) -> str:
    """Human/CSV form of the exponent whose reciprocal is r."""
    return "inf" if r == 0 else str(1 / r)


def _in_open_unit(r: Fraction, name: str):
    if not (0 < r < 1):
        raise DomainError(f"1/{name} = {r} must lie in (0, 1)")


# --------------------------------------------------------------------------- HLS

@dataclass(frozen=True)
class HlsExponents:
    """(p, q, r) through reciprocals ip, iq, ir, plus gamma and the weight ell."""
    ip: Fraction
    iq: Fraction
    ir: Fraction
    gamma: Fraction = ZERO
    ell: Fraction = ZERO

    @classmethod
    def from_exponents(cls, p, q, r, gamma=0, ell=0) -> "HlsExponents":
        return cls(recip(p), recip(q), recip(r), as_fraction(gamma), as_fraction(ell))

    def __post_init__(self):
        for name in ("ip", "iq", "ir", "gamma", "ell"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        _in_open_unit(self.ip, "p")
        _in_open_unit(self.iq, "q")
        _in_open_unit(self.ir, "r")
        if not (0 <= self.gamma <= 1):
            raise DomainError(f"gamma = {self.gamma} outside [0, 1]")
        if self.ell < 0:
            raise DomainError("weight must be non-negative")

    @property
    def p(self):
        return from_recip(self.ip)

    @property
    def q(self):
        return from_recip(self.iq)

    @property
    def r(self):
        return from_recip(self.ir)

    @property
    def delta(self) -> Fraction:
        """Scaling defect 1/p + 1/q - 1 - 1/r - gamma/3."""
        return self.ip + self.iq - 1 - self.ir - self.gamma / 3


@dataclass(frozen=True)
class HlsVerdict:
    status: str                 # admissible | violates-scaling | violates-r-range | violates-size | violates-weight
    delta: Fraction
    scaling_ok: bool
    range_ok: bool
    r_bounds: tuple
    strict: bool
    notes: tuple = ()

    @property
    def admissible(self) -> bool:
        return self.status == "admissible"


def r_range(gamma) -> tuple:
    """Bounds (gamma/6, 1 - 5 gamma/6) on 1/r and whether they are strict (gamma = 0)."""
    g = as_fraction(gamma)
    return g / 6, 1 - 5 * g / 6, g == 0


def _range_ok(ir: Fraction, gamma: Fraction) -> bool:
    lo, hi, strict = r_range(gamma)
    return (lo < ir < hi) if strict else (lo <= ir <= hi)


def check_hls_scaling(e: HlsExponents) -> HlsVerdict:
    """1/p + 1/q = 1 + 1/r + gamma/3 and gamma/6 <= 1/r <= 1 - 5 gamma/6 (strict at gamma = 0)."""
    d = e.delta
    sc = d == 0
    rg = _range_ok(e.ir, e.gamma)
    lo, hi, strict = r_range(e.gamma)
    status = "admissible" if (sc and rg) else ("violates-scaling" if not sc else "violates-r-range")
    return HlsVerdict(status, d, sc, rg, (lo, hi), strict)


def check_weighted_hls(p_m, q_m, m, r_m, ell1, gamma) -> HlsVerdict:
    """Weighted variant with an auxiliary exponent m (``"inf"`` allowed).

    Conditions: 1/p_m + 1/q_m + 1/m = 1 + 1/r_m + gamma/3, the r-range of the
    unweighted relation, 1/p_m + 1/m < 1, 1/q_m + 1/m < 1 and ell1 > 3/m. For
    1/m = 0 the weight condition is void, so the verdict coincides with
    :func:`check_hls_scaling`.
    """
    ip, iq, ir, im = recip(p_m), recip(q_m), recip(r_m), recip(m)
    g = as_fraction(gamma)
    l1 = as_fraction(ell1)
    for r_, name in ((ip, "p_m"), (iq, "q_m"), (ir, "r_m")):
        _in_open_unit(r_, name)
    if not (0 <= im < 1):
        raise DomainError(f"1/m = {im} must lie in [0, 1)")
    if not (0 <= g <= 1):
        raise DomainError(f"gamma = {g} outside [0, 1]")
    d = ip + iq + im - 1 - ir - g / 3
    sc = d == 0
    rg = _range_ok(ir, g)
    size_ok = (ip + im < 1) and (iq + im < 1)
    weight_ok = (l1 > 3 * im) if im > 0 else (l1 >= 0)
    lo, hi, strict = r_range(g)
    if not sc:
        status = "violates-scaling"
    elif not rg:
        status = "violates-r-range"
    elif not size_ok:
        status = "violates-size"
    elif not weight_ok:
        status = "violates-weight"
    else:
        status = "admissible"
    notes = []
    if not size_ok:
        notes.append(f"1/p_m+1/m={ip + im}, 1/q_m+1/m={iq + im}")
    if not weight_ok:
        notes.append(f"ell1={l1} not > 3/m={3 * im}")
    return HlsVerdict(status, d, sc, rg, (lo, hi), strict, tuple(notes))


# --------------------------------------------------------------------------- KT

def kt_bounds(ia: Fraction, d: int) -> tuple:
    """Reciprocals (1/p*, 1/r*) of the exact bounds for the harmonic mean a = 1/ia."""
    d = Fraction(d)
    if ia <= d / (d + 1):          # (d+1)/d <= a <= inf
        return (d + 1) * ia / d, (d - 1) * ia / d
    return ONE, 2 * ia - 1          # 1 <= a <= (d+1)/d


@dataclass(frozen=True)
class KtVerdict:
    iq: Fraction
    ir: Fraction
    ip: Fraction
    d: int
    ia: Fraction
    admissible: bool
    endpoint: bool
    reasons: tuple = ()

    @property
    def a(self):
        return from_recip(self.ia)

    @property
    def usable(self) -> bool:
        """Admissible and not an endpoint (endpoint estimates fail)."""
        return self.admissible and not self.endpoint


def check_kt_admissible(q, r, p, d: int = 3) -> KtVerdict:
    """Kinetic-transport admissibility of (q, r, p) in dimension d.

    Arguments are exponents (numbers, strings, ``"inf"``). Admissible iff
    1/q = (d/2)(1/p - 1/r), 1 <= a <= inf and p*(a) <= p <= a <= r <= r*(a),
    except that (q, r, p) = (a, inf, a/2) is excluded in d = 1. Endpoints are
    (a, r*(a), p*(a)) with (d+1)/d <= a < inf; they are admissible by the
    equations but flagged, since their Strichartz estimate is false.
    """
    if int(d) != d or d < 1:
        raise DomainError("dimension must be a positive integer")
    iq, ir, ip = recip(q), recip(r), recip(p)
    for v, name in ((iq, "q"), (ir, "r"), (ip, "p")):
        if not (0 <= v <= 1):
            raise DomainError(f"1/{name} = {v} outside [0, 1]")
    D = Fraction(d)
    ia = (ip + ir) / 2
    reasons = []
    if iq != D / 2 * (ip - ir):
        reasons.append("time relation 1/q = (d/2)(1/p - 1/r) fails")
    ips, irs = kt_bounds(ia, d)
    if ip > ips:
        reasons.append("p < p*(a)")
    if ip < ia:
        reasons.append("p > a")
    if ir > ia:
        reasons.append("r < a")
    if ir < irs:
        reasons.append("r > r*(a)")
    endpoint = (0 < ia <= D / (D + 1)) and iq == ia and ir == irs and ip == ips
    if d == 1 and ir == 0 and iq == ia and ip == 2 * ia:
        reasons.append("d=1 exception (a, inf, a/2)")
    return KtVerdict(iq, ir, ip, int(d), ia, not reasons, endpoint, tuple(reasons))


def harmonic_mean_recip(ix: Fraction, iy: Fraction) -> Fraction:
    """1/HM(x, y) from the reciprocals."""
    return (ix + iy) / 2


# --------------------------------------------------------------------------- epsilon window

@dataclass(frozen=True)
class EpsilonWindow:
    gamma: Fraction
    lower: Fraction
    upper: Fraction

    @property
    def strict_empty(self) -> bool:
        """Reading max{..} < eps <= upper."""
        return not (self.lower < self.upper)

    @property
    def closed_empty(self) -> bool:
        """Reading max{..} <= eps <= upper (eps > 0 still required)."""
        return self.upper < self.lower or self.upper <= 0

    @property
    def closed_point(self) -> bool:
        return self.lower == self.upper and self.upper > 0

    def contains(self, eps, strict: bool = True) -> bool:
        e = as_fraction(eps)
        if e <= 0:
            return False
        lo_ok = (self.lower < e) if strict else (self.lower <= e)
        return lo_ok and e <= self.upper

    def describe(self) -> dict:
        return {
            "gamma": str(self.gamma),
            "lower": str(self.lower),
            "upper": str(self.upper),
            "strict_reading": "empty" if self.strict_empty else f"({self.lower}, {self.upper}]",
            "closed_reading": ("empty" if self.closed_empty else
                               (f"{{{self.upper}}}" if self.closed_point else
                                f"[{self.lower}, {self.upper}]" if self.lower > 0 else f"(0, {self.upper}]")),
        }


def epsilon_window(gamma) -> EpsilonWindow:
    """Bounds max{0, 5 gamma/12 - 7/18} and 1/9 - gamma/12 on eps."""
    g = as_fraction(gamma)
    if not (0 <= g <= 1):
        raise DomainError(f"gamma = {g} outside [0, 1]")
    return EpsilonWindow(g, max(ZERO, 5 * g / 12 - Fraction(7, 18)), Fraction(1, 9) - g / 12)


# --------------------------------------------------------------------------- solvable triplets

@dataclass(frozen=True)
class Triplet:
    """Reciprocals (1/q, 1/r, 1/p)."""
    iq: Fraction
    ir: Fraction
    ip: Fraction

    def conjugate(self) -> "Triplet":
        return Triplet(1 - self.iq, 1 - self.ir, 1 - self.ip)

    @property
    def ia(self) -> Fraction:
        return (self.ip + self.ir) / 2

    def kt(self, d: int = 3) -> KtVerdict:
        return check_kt_admissible(fmt_exp(self.iq), fmt_exp(self.ir), fmt_exp(self.ip), d)

    def as_tuple(self):
        return (self.iq, self.ir, self.ip)


@dataclass(frozen=True)
class SolvableTriplets:
    eps: Fraction
    primal: Triplet          # (q, r, p)
    primed: Triplet          # (q~', r~', p~')
    checks: dict = field(default_factory=dict)

    @property
    def tilde(self) -> Triplet:
        return self.primed.conjugate()


def solvable_triplets(eps) -> SolvableTriplets:
    """The eps-family (1/3-3e, 2/9+e, 4/9-e) and its dual (2/3-6e, 4/9+2e, 2/9-2e).

    ``checks`` records the identities verified exactly:
    HM(p, r) = 3, HM(p~', r~') = 3 (pairing), the time relation of the primal
    and of the conjugate (tilde) triplet, and the KT verdicts of both (the
    tilde triplet has a = 3/2 and is admissible only for eps <= 1/18).
    """
    e = as_fraction(eps)
    if not (0 < e < Fraction(1, 9)):
        raise DomainError(f"eps = {e} outside (0, 1/9)")
    pr = Triplet(Fraction(1, 3) - 3 * e, Fraction(2, 9) + e, Fraction(4, 9) - e)
    du = Triplet(Fraction(2, 3) - 6 * e, Fraction(4, 9) + 2 * e, Fraction(2, 9) - 2 * e)
    ti = du.conjugate()
    checks = {
        "hm_primal": 1 / pr.ia,
        "hm_primed": 1 / du.ia,
        "hm_tilde": 1 / ti.ia,
        "primal_time_relation": pr.iq == Fraction(3, 2) * (pr.ip - pr.ir),
        "tilde_time_relation": ti.iq == Fraction(3, 2) * (ti.ip - ti.ir),
        "pairing": pr.ia == du.ia,
        "primal_kt": pr.kt(3),
        "tilde_kt": ti.kt(3),
    }
    if not (checks["primal_time_relation"] and checks["tilde_time_relation"] and checks["pairing"]):
        raise AssertionError("solvable triplet identities failed")  # algebraic identities; never expected
    return SolvableTriplets(e, pr, du, checks)


def section6_weighted_check(eps, gamma, ell1) -> HlsVerdict:
    """Weighted-HLS verdict for p_m = q_m = p, r_m = p~' and 1/m = (1 + gamma)/3."""
    st = solvable_triplets(eps)
    g = as_fraction(gamma)
    p = fmt_exp(st.primal.ip)
    return check_weighted_hls(p, p, fmt_exp((1 + g) / 3), fmt_exp(st.primed.ip), ell1, g)


# --------------------------------------------------------------------------- loss exponents

@dataclass(frozen=True)
class LossExponents:
    gamma: Fraction
    ell2_lower: Fraction       # ell2 > this
    ell3_offset: Fraction      # ell3 = ell2 + this
    second: Triplet            # (q2, r2, p2)
    a2: Fraction
    primed: Optional[Triplet]  # (q~2', r~2', p~2') when eps given
    checks: dict


def loss_exponent_set(gamma, eps=None) -> LossExponents:
    """ell2 > gamma + 9/10, ell3 = ell2 + gamma + 1/9 and the second triplet.

    (1/q2, 1/r2, 1/p2) = (1/2, 11/30, 21/30) with a2 = 15/8. When ``eps`` is
    given the dual triplet 1/q~2' = 1/q + 1/2, 1/r~2' = 1/r + 11/30,
    1/p~2' = 1/p + 1/30 is built from the primal eps-triplet.
    """
    g = as_fraction(gamma)
    if not (0 <= g <= 1):
        raise DomainError(f"gamma = {g} outside [0, 1]")
    second = Triplet(Fraction(1, 2), Fraction(11, 30), Fraction(21, 30))
    a2 = 1 / second.ia
    checks = {"second_kt": second.kt(3), "uni_har": second.ip + second.ir}
    primed = None
    if eps is not None:
        pr = solvable_triplets(eps).primal
        primed = Triplet(pr.iq + Fraction(1, 2), pr.ir + Fraction(11, 30), pr.ip + Fraction(1, 30))
        ti = primed.conjugate()
        checks.update({
            "primed_har": primed.ip + primed.ir,
            "uni_time": pr.iq + second.iq == primed.iq,
            "uni_x": pr.ir + second.ir == primed.ir,
            "uni_v": (pr.ip + second.ip + (1 + g) / 3 == 1 + primed.ip + g / 3,
                      pr.ip < primed.ip < second.ip),
            "tilde": ti,
            "tilde_kt": ti.kt(3),
        })
    return LossExponents(g, g + Fraction(9, 10), g + Fraction(1, 9), second, a2, primed, checks)


# --------------------------------------------------------------------------- enumeration

def enumerate_reciprocals(max_den: int):
    """All rationals in (0, 1) with denominator <= max_den, sorted."""
    seen = set()
    for b in range(2, max_den + 1):
        for a in range(1, b):
            seen.add(Fraction(a, b))
    return sorted(seen)


def admissible_r_for_gamma(gamma, max_den: int) -> list:
    """Values 1/r (denominator <= max_den) for which some (p, q) with
    1/p, 1/q in (0, 1) and denominators <= max_den make the HLS relation hold."""
    g = as_fraction(gamma)
    vals = enumerate_reciprocals(max_den)
    vs = set(vals)
    out = []
    for ir in vals:
        if not _range_ok(ir, g):
            continue
        target = 1 + ir + g / 3
        if any((target - ip) in vs for ip in vals):
            out.append(ir)
    return out
