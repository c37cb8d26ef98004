"""Flat ``section.key = value`` configuration files with a typed schema.

Example::

    # lab run
    kernel.gamma = 1
    grid.R = 6
    grid.n = 16
    exponents.r = 6
    sweep.lambdas = 1/2, 1, 2, 4

Blank lines and ``#`` comments are ignored. Rationals are parsed exactly from
``num/den`` (or decimal) strings and never pass through a float. Unknown keys,
duplicate keys and malformed values raise :class:`ConfigurationError` naming
the schema path of the offending key.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import ConfigurationError, DomainError
from .exponents import as_fraction


def _rational(s: str) -> Fraction:
    return as_fraction(s)


def _exponent(s: str):
    """An exponent: a positive rational or ``inf``; stored as the string."""
    t = s.strip().lower()
    if t in ("inf", "infinity"):
        return "inf"
    v = as_fraction(t)
    if v <= 0:
        raise DomainError("exponent must be positive")
    return str(v)


def _int(s: str) -> int:
    return int(s.strip())


def _float(s: str) -> float:
    return float(s.strip())


def _bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _list(conv):
    def parse(s: str):
        items = [x for x in (p.strip() for p in s.split(",")) if x]
        if not items:
            raise ValueError("empty list")
        return tuple(conv(x) for x in items)
    parse.__name__ = f"list[{conv.__name__.lstrip('_')}]"
    return parse


def _choice(*options):
    def parse(s: str):
        t = s.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t
    parse.__name__ = "choice"
    return parse


def _str(s: str) -> str:
    return s.strip()


@dataclass(frozen=True)
class Key:
    parse: object
    default: object
    doc: str


SCHEMA: dict = {
    "kernel.gamma": Key(_rational, Fraction(0), "kinetic exponent gamma in [0, 1]"),
    "kernel.scheme": Key(_choice("deposit", "interp"), "deposit", "gain-term discretisation"),
    "kernel.sharpen": Key(_bool, True, "apply the conservative sharpening filter to Q+"),
    "grid.R": Key(_float, 6.0, "velocity box half-width"),
    "grid.n": Key(_int, 16, "velocity points per axis (even, >= 8)"),
    "quad.n_mu": Key(_int, 8, "Gauss-Legendre order in cos(theta)"),
    "quad.n_phi": Key(_int, 16, "trapezoid order in the azimuth"),
    "exponents.p": Key(_exponent, "3/2", "HLS exponent p"),
    "exponents.q": Key(_exponent, "3/2", "HLS exponent q"),
    "exponents.r": Key(_exponent, "3", "HLS exponent r"),
    "exponents.ell": Key(_rational, Fraction(0), "polynomial weight <v>^ell"),
    "norms.mixed": Key(_list(_exponent), ("6", "18/5", "18/7"), "(q, r, p) for the mixed norm"),
    "probe.kind": Key(_choice("ratio", "scaling", "moment", "translation", "conservation"), "scaling",
                      "hls-sweep probe"),
    "family.kind": Key(_choice("gaussian", "mixture-pairs"), "gaussian", "input family"),
    "family.sigma": Key(_float, 0.7071067811865476, "Gaussian width (exp(-v^2/(2 sigma^2)))"),
    "family.count": Key(_int, 20, "number of seeded mixture pairs"),
    "sweep.lambdas": Key(_list(_rational), (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)),
                         "dilation factors"),
    "sweep.deltas": Key(_list(_rational), (Fraction(-1, 3), Fraction(0), Fraction(1, 3)),
                        "scaling defects to sweep (p = q shifted by delta/2 from the admissible point)"),
    "sweep.mode": Key(_choice("dilate", "fixed"), "dilate", "dilate the grid with the data or keep it fixed"),
    "moment.norms": Key(_list(_int), (0, 1, 2, 3, 4, 5), "centre distances |v0|"),
    "moment.r": Key(_exponent, "6", "forced output exponent r"),
    "translation.p": Key(_exponent, "2", "output exponent p of the translated Radon probe"),
    "translation.radius": Key(_float, 3.0, "largest |v_*| sampled"),
    "symbol.mode": Key(_choice("eval", "ray", "region", "partition"), "ray", "symbol subcommand mode"),
    "symbol.method": Key(_choice("reduced", "closed", "hemisphere"), "reduced", "symbol evaluation route"),
    "symbol.theta0": Key(_list(_rational), (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)),
                         "ray angles as multiples of pi"),
    "symbol.s_min": Key(_float, 100.0, "smallest s"),
    "symbol.s_max": Key(_float, 10000.0, "largest s"),
    "symbol.s_count": Key(_int, 9, "number of s samples (geometric)"),
    "symbol.Z": Key(_int, 8, "cone truncation"),
    "space.d_x": Key(_int, 0, "0 = homogeneous, 1 = periodic slab"),
    "space.L": Key(_float, 20.0, "slab length"),
    "space.n_x": Key(_int, 16, "slab points"),
    "time.T": Key(_float, 2.0, "horizon"),
    "time.dt": Key(_float, 0.1, "time step"),
    "solver.ell": Key(_float, 2.0, "weight exponent (> 2 gamma + 10/9)"),
    "solver.eta": Key(_float, 1e-2, "size of <v>^ell f0 in L^3"),
    "solver.picard_tol": Key(_float, 1e-10, "relative Picard tolerance"),
    "solver.picard_max_iter": Key(_int, 40, "Picard iteration cap"),
    "solver.ks_tol": Key(_float, 1e-6, "bracket gap tolerance"),
    "solver.ks_max_iter": Key(_int, 15, "bracket iteration cap"),
    "solver.uniqueness": Key(_bool, True, "run the second-bracket uniqueness probe"),
    "solver.sigma_v": Key(_float, 1.0, "initial Maxwellian width"),
    "solver.sigma_x": Key(_float, 1.5, "initial bump width in x (slab)"),
    "solver.initial": Key(_str, "", "initial field container (empty: built-in profile)"),
}


def sections() -> list:
    return sorted({k.split(".", 1)[0] for k in SCHEMA})


class Config(dict):
    """Parsed configuration: schema defaults overlaid with the file's values."""

    def __init__(self, values=None, source_text: str = ""):
        super().__init__({k: v.default for k, v in SCHEMA.items()})
        self.explicit = set()
        self.source_text = source_text
        for k, v in (values or {}).items():
            self.set(k, v)

    def set(self, key: str, raw):
        if key not in SCHEMA:
            sec = key.split(".", 1)[0]
            hint = f"schema section {sec}.*" if sec in sections() else f"sections: {', '.join(sections())}"
            raise ConfigurationError(f"unknown configuration key ({hint})", key)
        spec = SCHEMA[key]
        if isinstance(raw, str):
            try:
                val = spec.parse(raw)
            except (ValueError, DomainError, ArithmeticError) as exc:
                raise ConfigurationError(
                    f"bad value {raw!r} ({getattr(spec.parse, '__name__', 'value')}: {exc})", key) from None
        else:
            val = raw
        self[key] = val
        self.explicit.add(key)

    def canonical(self) -> str:
        """Deterministic text of every key (used for the config hash)."""
        return "".join(f"{k} = {_render(self[k])}\n" for k in sorted(self))


def _render(v) -> str:
    if isinstance(v, tuple):
        return ", ".join(_render(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_config_text(text: str, origin: str = "<config>") -> Config:
    cfg = Config(source_text=text)
    seen = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigurationError(f"{origin}:{lineno}: expected 'section.key = value'", f"line {lineno}")
        key, val = (x.strip() for x in s.split("=", 1))
        if key in seen:
            raise ConfigurationError(f"{origin}:{lineno}: duplicate key (first on line {seen[key]})", key)
        seen[key] = lineno
        try:
            cfg.set(key, val)
        except ConfigurationError as exc:
            raise ConfigurationError(f"{origin}:{lineno}: {exc.detail}", exc.key) from None
    return cfg


def load_config(path) -> Config:
    if path is None:
        return Config()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {p}: {exc.strerror}", "--config") from None
    return parse_config_text(text, str(p))


def schema_doc() -> str:
    """Human-readable schema listing (used by ``--help-config``)."""
    return "".join(f"{k:26s} {_render(v.default):>22s}  {v.doc}\n" for k, v in SCHEMA.items())
