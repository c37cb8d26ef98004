"""Command-line entry point: ``kinetic-hls <subcommand> [options]``.

Exit codes: 0 success, 1 validation error (bad flags, config or inputs),
2 numerical self-check failure (for example a bracket ordering violation).

Results go to ``--out`` (default: ``$KINETIC_HLS_OUT`` or ``./out``). CSV and
JSON outputs are byte-identical for identical configuration and seed; the
only timestamps live in the sidecar ``run.log``.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AcceptanceFailure, ConfigurationError, KineticError, ValidationError
from .fieldio import config_hash, format_csv, read_field, write_field

ENV_OUT = "KINETIC_HLS_OUT"
log = logging.getLogger("kinetic_hls")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _u64(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key=value configuration file")
    common.add_argument("--out", metavar="DIR", help=f"output directory (default: ${ENV_OUT} or ./out)")
    common.add_argument("--threads", type=_positive_int, metavar="N", help="cap on worker threads")
    common.add_argument("--seed", type=_u64, default=0, metavar="U64", help="seed for generated families")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="kinetic-hls", description="Gain-term lab, symbol analysis and bracket solver.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--help-config", action="store_true", help="list every configuration key and exit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    e = sub.add_parser("exponents", parents=[common], help="exact exponent algebra")
    e.add_argument("--gamma", default=None, help="kinetic exponent (rational)")
    e.add_argument("--check-r", dest="check_r", metavar="1/R", help="reciprocal 1/r to test")
    e.add_argument("--eps", help="epsilon for the solvable triplets")
    e.add_argument("--triplet", metavar="1/Q,1/R,1/P", help="KT admissibility of (q, r, p), given as reciprocals")
    e.add_argument("--dim", type=int, default=3, help="space dimension for --triplet")
    e.add_argument("--max-den", dest="max_den", type=int, default=72, help="denominator bound for sweeps")

    c = sub.add_parser("collide", parents=[common], help="gain/loss terms and conservation defects")
    c.add_argument("--input", metavar="FIELD", help="field container for f (and g = f)")

    n = sub.add_parser("norms", parents=[common], help="weighted and mixed norms of a field")
    n.add_argument("--input", metavar="FIELD", required=True)

    sub.add_parser("hls-sweep", parents=[common], help="HLS ratio probes (probe.kind)")

    s = sub.add_parser("symbol", parents=[common], help="Radon symbol: eval/ray/region/partition")
    s.add_argument("--mode", choices=("eval", "ray", "region", "partition"))

    for name in ("solve-gain", "solve-ks"):
        sp = sub.add_parser(name, parents=[common], help="gain-only Picard solve" if name == "solve-gain"
                            else "Kaniel-Shinbrot bracket")
        sp.add_argument("--initial", metavar="FIELD", help="initial field container")
    return p


# --------------------------------------------------------------------------- output helpers

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, float)):
        f = float(x)
        return f if math.isfinite(f) else repr(f)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


class Run:
    def __init__(self, args, cfg):
        self.args = args
        self.cfg = cfg
        out = args.out or os.environ.get(ENV_OUT) or "out"
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        flags = {k: v for k, v in sorted(vars(args).items())
                 if k not in ("config", "out", "threads", "verbose", "help_config")}
        self.hash = config_hash(f"{flags!r}\n{cfg.canonical()}")
        self.meta = {"command": args.command, "config_hash": self.hash, "seed": args.seed,
                     "version": __version__}
        self.files = []

    def csv(self, name, header, rows, extra=None):
        meta = dict(self.meta)
        meta.update(extra or {})
        (self.out / name).write_text(format_csv(header, rows, meta))
        self.files.append(name)

    def json(self, name, obj):
        doc = {"meta": self.meta, "result": obj}
        (self.out / name).write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
        self.files.append(name)

    def field(self, name, obj):
        write_field(self.out / name, obj)
        self.files.append(name)

    def sidecar(self, status):
        stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        with open(self.out / "run.log", "a") as fh:
            fh.write(f"{stamp} {self.args.command} hash={self.hash} status={status} files={','.join(self.files)}\n")


# --------------------------------------------------------------------------- shared builders

def _grid(cfg):
    from .grids import build_velocity_grid
    return build_velocity_grid(cfg["grid.R"], cfg["grid.n"])


def _squad(cfg):
    from .quadrature import build_hemisphere_quadrature
    return build_hemisphere_quadrature(cfg["quad.n_mu"], cfg["quad.n_phi"])


def _kernel(cfg, gamma=None):
    from .collision import CollisionKernel
    g = cfg["kernel.gamma"] if gamma is None else gamma
    return CollisionKernel(float(g))


def _gain_kw(cfg):
    return {"scheme": cfg["kernel.scheme"], "sharpen_output": cfg["kernel.sharpen"]}


def _hls(cfg):
    from .exponents import HlsExponents, recip
    return HlsExponents(recip(cfg["exponents.p"]), recip(cfg["exponents.q"]), recip(cfg["exponents.r"]),
                        cfg["kernel.gamma"], cfg["exponents.ell"])


# --------------------------------------------------------------------------- subcommands

def cmd_exponents(run: Run) -> int:
    from . import exponents as X
    a = run.args
    gamma = X.as_fraction(a.gamma) if a.gamma is not None else run.cfg["kernel.gamma"]
    rows = []
    lo, hi, strict = X.r_range(gamma)
    rows.append(("r-range", f"{lo}..{hi}", "strict" if strict else "closed", f"gamma={gamma}"))
    adm = X.admissible_r_for_gamma(gamma, a.max_den)
    unique = adm[0] if len(adm) == 1 else ""
    rows.append(("admissible-1/r", f"{len(adm)} values", f"unique={unique}" if unique != "" else "",
                 f"max_den={a.max_den}"))
    if a.check_r is not None:
        ir = X.as_fraction(a.check_r)
        ok = ir in set(adm) if ir.denominator <= a.max_den else (
            (lo < ir < hi) if strict else (lo <= ir <= hi))
        rows.append(("check-r", str(ir), "admissible" if ok else "rejected", f"gamma={gamma}"))
    w = X.epsilon_window(gamma)
    d = w.describe()
    rows.append(("eps-window", f"{d['lower']}..{d['upper']}", f"strict={d['strict_reading']}",
                 f"closed={d['closed_reading']}"))
    report = {"gamma": gamma, "r_range": [lo, hi, strict], "admissible_r": adm, "eps_window": d}
    if a.eps is not None:
        st = X.solvable_triplets(a.eps)
        for name, t in (("primal", st.primal), ("primed", st.primed), ("tilde", st.tilde)):
            v = t.kt(3)
            rows.append((f"triplet-{name}", f"({X.fmt_exp(t.iq)},{X.fmt_exp(t.ir)},{X.fmt_exp(t.ip)})",
                         "endpoint" if v.endpoint else ("admissible" if v.admissible else "rejected"),
                         f"a={v.a}"))
        sw = X.section6_weighted_check(a.eps, gamma, 2 * gamma + Fraction(10, 9) + Fraction(1, 100))
        rows.append(("weighted-check", f"eps={st.eps}", sw.status, "; ".join(sw.notes)))
        le = X.loss_exponent_set(gamma, a.eps)
        rows.append(("loss-a2", str(le.a2), "admissible" if le.checks["second_kt"].admissible else "rejected",
                     f"uni_har={le.checks['uni_har']}"))
        report["solvable"] = {"eps": st.eps, "checks": {k: (v if not isinstance(v, X.KtVerdict) else
                                                            {"admissible": v.admissible, "endpoint": v.endpoint,
                                                             "a": str(v.a)}) for k, v in st.checks.items()}}
    if a.triplet is not None:
        parts = [x.strip() for x in a.triplet.split(",")]
        if len(parts) != 3:
            raise ConfigurationError("expected three comma-separated exponents", "--triplet")
        v = X.check_kt_admissible(*(X.fmt_exp(X.as_fraction(x)) for x in parts), d=a.dim)
        rows.append(("kt-triplet", a.triplet, "endpoint" if v.endpoint else
                     ("admissible" if v.admissible else "rejected"), "; ".join(v.reasons) or f"a={v.a}"))
    run.csv("exponents.csv", ["item", "value", "verdict", "note"], rows)
    run.json("exponents.json", report)
    for r in rows:
        print(",".join(str(x) for x in r))
    return 0


def cmd_collide(run: Run) -> int:
    from .collision import conservation_defect, gain_term, loss_term
    from .grids import DistributionField
    from .lab import GaussianMixture, mixture_pair_family
    cfg = run.cfg
    squad, kern = _squad(cfg), _kernel(cfg)
    rows = []
    if run.args.input:
        tr = read_field(run.args.input)
        f = DistributionField(tr.grid, tr.values[0, 0], bool(np.all(tr.values[0, 0] >= 0)))
        pairs = [("input", f, f)]
    elif cfg["family.kind"] == "mixture-pairs":
        grid = _grid(cfg)
        fam = mixture_pair_family(run.args.seed, cfg["family.count"])
        fam.check_grid(grid)
        pairs = [(lab, f.sample(grid), g.sample(grid)) for lab, (f, g) in zip(fam.labels, fam.members)]
    else:
        grid = _grid(cfg)
        m = GaussianMixture.single(sigma=cfg["family.sigma"]).sample(grid)
        pairs = [("gaussian", m, m)]
    for lab, f, g in pairs:
        d = conservation_defect(f, g, kern, squad, **_gain_kw(cfg))
        rows.append((lab, d["mass_f"], d["mass_g"], d["mass_gain"], d["mass_loss"], d["defect"]))
    report = {"max_defect": max(r[-1] for r in rows), "count": len(rows)}
    if len(pairs) == 1:
        lab, f, g = pairs[0]
        qm = loss_term(f, g, kern, squad)
        q = gain_term(f, g, kern, squad, **_gain_kw(cfg)) - qm
        run.field("collision.khf", q)
        # sup-norm residual relative to the loss term; ~0 for a Maxwellian pair
        report["relative_residual_sup"] = float(np.abs(q.values).max() / np.abs(qm.values).max())
    run.csv("collide.csv", ["label", "mass_f", "mass_g", "mass_gain", "mass_loss", "defect"], rows,
            {"gamma": cfg["kernel.gamma"], "n": cfg["grid.n"]})
    run.json("collide.json", report)
    print(f"max defect {max(r[-1] for r in rows):.3e} over {len(rows)} pair(s)")
    return 0


def cmd_norms(run: Run) -> int:
    from .exponents import recip
    from .norms import mixed_lebesgue_norm, velocity_norm
    cfg = run.cfg
    tr = read_field(run.args.input)
    ell = float(cfg["exponents.ell"])
    ip = recip(cfg["exponents.p"])
    p = math.inf if ip == 0 else 1 / float(ip)
    rows = []
    for k, t in enumerate(tr.times):
        for j, x in enumerate(tr.space.axis):
            rows.append((float(t), float(x), float(velocity_norm(tr.values[k, j], tr.grid, ell, p))))
    report = {"ell": ell, "p": cfg["exponents.p"]}
    if tr.n_t > 1:
        q, r, pm = (math.inf if recip(e) == 0 else 1 / float(recip(e)) for e in cfg["norms.mixed"])
        report["mixed"] = {"qrp": list(cfg["norms.mixed"]), "value": mixed_lebesgue_norm(tr, q, r, pm, ell)}
    run.csv("norms.csv", ["t", "x", "weighted_lp"], rows)
    run.json("norms.json", report)
    print(json.dumps(_jsonable(report), sort_keys=True))
    return 0


def _scaling_exponents(cfg):
    from .exponents import HlsExponents, recip
    g = cfg["kernel.gamma"]
    ir = recip(cfg["exponents.r"])
    base = (1 + ir + g / 3) / 2
    return [HlsExponents(base + d / 2, base + d / 2, ir, g) for d in cfg["sweep.deltas"]]


def cmd_hls(run: Run) -> int:
    from . import lab
    cfg = run.cfg
    kind = cfg["probe.kind"]
    grid, squad, kern = _grid(cfg), _squad(cfg), _kernel(cfg)
    kw = _gain_kw(cfg)
    base = lab.GaussianMixture.single(sigma=cfg["family.sigma"])
    if kind == "ratio":
        e = _hls(cfg)
        f = base.sample(grid)
        r = lab.estimate_ratio(f, f, e, kern, squad, **kw)
        run.csv("hls.csv", ["p", "q", "r", "gamma", "ell", "delta", "status", "ratio"], [tuple(r.row().values())])
        run.json("hls.json", r.row())
        print(f"ratio {r.ratio!r} ({r.status})")
    elif kind == "scaling":
        exps = _scaling_exponents(cfg)
        res = lab.scaling_sweep(base, base, exps, kern, squad, grid, [float(x) for x in cfg["sweep.lambdas"]],
                                mode=cfg["sweep.mode"], **kw)
        rows = []
        for e in exps:
            lbl = lab._label(e)
            for lam, val in zip(res.lambdas, res.ratios[lbl]):
                rows.append((str(e.delta), str(e.p), str(e.q), str(e.r), lam, val))
        run.csv("hls.csv", ["delta", "p", "q", "r", "lambda", "ratio"], rows,
                {"gamma": cfg["kernel.gamma"], "mode": res.mode})
        report = {lab._label(e): {"delta": e.delta, "slope": res.slopes[lab._label(e)],
                                  "expected": res.expected[lab._label(e)]} for e in exps}
        run.json("hls.json", {"gamma": cfg["kernel.gamma"], "mode": res.mode, "sweeps": report})
        for k, v in report.items():
            print(f"{k}: slope {v['slope']!r} expected {v['expected']!r}")
    elif kind == "moment":
        from .exponents import recip
        m = lab.moment_probe(cfg["kernel.gamma"], cfg["exponents.ell"], kern, squad, grid,
                             norms=cfg["moment.norms"], sigma=cfg["family.sigma"],
                             ir=recip(cfg["moment.r"]), **kw)
        rows = [(k, a, b) for k, a, b in zip(m.norms, m.ratios, m.comparator_ratios)]
        run.csv("hls.csv", ["center_norm", "ratio", "comparator_ratio"], rows)
        run.json("hls.json", {"spread": m.spread, "comparator_trend": m.comparator_trend,
                              "exponents": [str(m.exponents.p), str(m.exponents.q), str(m.exponents.r)],
                              "comparator": [str(m.comparator.p), str(m.comparator.q), str(m.comparator.r)]})
        print(f"spread {m.spread!r}; comparator {m.comparator_trend}")
    elif kind == "translation":
        from .exponents import recip
        rad = cfg["translation.radius"]
        dirs = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
        vs = [(0.0, 0.0, 0.0)]
        for k in (1, 2, 3):
            for d in dirs:
                dv = np.asarray(d, float) / np.linalg.norm(d)
                vs.append(tuple(float(x) for x in dv * rad * k / 3))
        h = base.sample(grid)
        t = lab.translation_probe(h, recip(cfg["translation.p"]), cfg["kernel.gamma"], vs, kern, squad)
        rows = [(*v, r) for v, r in zip(t.v_stars, t.ratios)]
        run.csv("hls.csv", ["v1", "v2", "v3", "ratio"], rows)
        run.json("hls.json", {"baseline": t.baseline, "sup": t.sup, "sup_over_baseline": t.sup / t.baseline,
                              "in_theorem_range": t.in_theorem_range, "tail_integrable": t.tail_integrable})
        print(f"sup/baseline {t.sup / t.baseline!r}")
    elif kind == "conservation":
        from .collision import conservation_defect
        fam = lab.mixture_pair_family(run.args.seed, cfg["family.count"])
        fam.check_grid(grid)
        rows = []
        for lbl, (f, g) in zip(fam.labels, fam.members):
            d = conservation_defect(f.sample(grid), g.sample(grid), kern, squad, **kw)
            rows.append((lbl, d["mass_f"], d["mass_g"], d["mass_gain"], d["mass_loss"], d["defect"]))
        run.csv("hls.csv", ["label", "mass_f", "mass_g", "mass_gain", "mass_loss", "defect"], rows,
                {"gamma": cfg["kernel.gamma"], "n": grid.n})
        run.json("hls.json", {"max_defect": max(r[-1] for r in rows), "defects": [r[-1] for r in rows]})
        print(f"max defect {max(r[-1] for r in rows):.3e}")
    return 0


def cmd_symbol(run: Run) -> int:
    from . import symbol as S
    cfg = run.cfg
    mode = run.args.mode or cfg["symbol.mode"]
    g = float(cfg["kernel.gamma"])
    header = ["s", "theta0", "re_a", "im_a", "abs_principal", "residual"]
    rows = []
    report = {"mode": mode, "gamma": g, "method": cfg["symbol.method"]}
    s_vals = np.geomspace(cfg["symbol.s_min"], cfg["symbol.s_max"], cfg["symbol.s_count"])
    thetas = [float(t) * math.pi for t in cfg["symbol.theta0"]]
    squad = _squad(cfg) if cfg["symbol.method"] == "hemisphere" else None
    if mode == "partition":
        rep = S.partition_check(S.DyadicPartition(cfg["symbol.Z"]))
        header = ["check", "value"]
        rows = [("zeta_deviation", rep["zeta_deviation"]), ("rho_deviation", rep["rho_deviation"]),
                ("rho_support_ok", rep["rho_support_ok"]),
                ("zeta_supports_in_cones", all(rep["zeta_supports_in_cones"].values()))]
        report.update(rep)
    elif mode == "ray":
        slopes = {}
        for th in thetas:
            r = S.asymptotic_residual(th, s_vals, g, method=cfg["symbol.method"], Z=cfg["symbol.Z"])
            for s, a, pr, res in r["rows"]:
                rows.append((s, th, a.real, a.imag, abs(pr), res))
            slopes[repr(th)] = {k: r[k] for k in ("slope", "raw_slope", "status", "bound", "principal_slope",
                                                  "max_relative_residual")}
        report["rays"] = slopes
    else:
        for th in thetas:
            for s in s_vals:
                pt = S.PhasePoint.from_invariants(float(s), th)
                a = S.symbol_a(pt, g, cfg["symbol.method"], squad)
                if mode == "region":
                    zs = S.active_cones(th, cfg["symbol.Z"])
                    labels = sorted(set().union(*(S.region_classify(pt, z) for z in zs))) if zs else []
                    report.setdefault("regions", []).append({"s": float(s), "theta0": th, "cones": zs,
                                                             "labels": labels})
                pr = S.principal_symbol(pt, g) if S.in_region_I(pt, cfg["symbol.Z"]) else None
                rows.append((float(s), th, a.real, a.imag, "" if pr is None else abs(pr),
                             "" if pr is None else abs(a - pr)))
    run.csv("symbol.csv", header, rows, {"mode": mode})
    run.json("symbol.json", report)
    print(f"symbol {mode}: {len(rows)} rows")
    return 0


def _solve_config(cfg):
    from .grids import SpatialGrid
    from .solver import SolveConfig
    d_x = cfg["space.d_x"]
    space = SpatialGrid(d_x, cfg["space.L"], cfg["space.n_x"]) if d_x == 1 else SpatialGrid()
    return SolveConfig(gamma=float(cfg["kernel.gamma"]), ell=cfg["solver.ell"], T=cfg["time.T"],
                       dt=cfg["time.dt"], space=space, grid=_grid(cfg), n_mu=cfg["quad.n_mu"],
                       n_phi=cfg["quad.n_phi"], eta=cfg["solver.eta"], picard_tol=cfg["solver.picard_tol"],
                       picard_max_iter=cfg["solver.picard_max_iter"], ks_tol=cfg["solver.ks_tol"],
                       ks_max_iter=cfg["solver.ks_max_iter"])


def _initial(run, scfg):
    from .grids import PhaseSpaceField
    from .solver import initial_data
    path = run.args.initial or run.cfg["solver.initial"]
    if path:
        tr = read_field(path)
        return PhaseSpaceField(tr.space, tr.grid, tr.values[0], 0.0)
    return initial_data(scfg, run.cfg["solver.sigma_v"], run.cfg["solver.sigma_x"])


def cmd_solve(run: Run) -> int:
    from . import solver as SV
    cfg = run.cfg
    scfg = _solve_config(cfg)
    f0 = _initial(run, scfg)
    if run.args.command == "solve-gain":
        res = SV.gain_only_solve(f0, scfg)
        traj = res.trajectory
        rows = [(k + 1, d, "" if k == 0 else res.factors[k - 1]) for k, d in enumerate(res.differences)]
        run.csv("iterations.csv", ["k", "difference", "ratio"], rows)
        report = {"iterations": res.iterations, "contraction": res.contraction}
    else:
        res = SV.ks_iterate(f0, scfg, probe_uniqueness=cfg["solver.uniqueness"])
        traj = res.limit
        rows = [(s.n, s.defect_g, s.defect_h, s.defect_gap, s.gap, "" if s.ratio is None else s.ratio)
                for s in res.states]
        run.csv("iterations.csv", ["n", "defect_g", "defect_h", "defect_gap", "gap", "ratio"], rows)
        report = {"gap": res.gap, "gaps": res.gaps, "ratios": res.ratios,
                  "beginning_condition": res.beginning_condition,
                  "g2_picard_discrepancy": res.g2_picard_discrepancy, "uniqueness": res.uniqueness,
                  "picard_contraction": res.picard.contraction, "picard_iterations": res.picard.iterations,
                  "limit_min": float(traj.values.min()),
                  "min_ordering_defect": min(min(s.defect_g, s.defect_h, s.defect_gap) for s in res.states[1:])}
    if run.args.command == "solve-ks":
        ps = SV.scattering_probe(res.picard.trajectory)
        report["gain_only_scattering"] = {"residuals": ps["residuals"], "monotone": ps["monotone"],
                                          "half_ratio": ps["half_ratio"]}
    scat = SV.scattering_probe(traj)
    drift = SV.mass_drift_check(traj)
    report.update({"scattering": {"residuals": scat["residuals"], "monotone": scat["monotone"],
                                  "half_ratio": scat["half_ratio"]},
                   "mass": {"history": drift["masses"], "max_relative_drift": drift["max_relative_drift"],
                            "within_budget": drift["ok"]}})
    run.field("trajectory.khf", traj)
    run.json("report.json", report)
    print(json.dumps(_jsonable({k: report[k] for k in report if k in ("gap", "contraction", "iterations")}),
                     sort_keys=True))
    return 0


COMMANDS = {"exponents": cmd_exponents, "collide": cmd_collide, "norms": cmd_norms, "hls-sweep": cmd_hls,
            "symbol": cmd_symbol, "solve-gain": cmd_solve, "solve-ks": cmd_solve}


def _set_threads(n):
    if n is None:
        return
    import numba
    cap = numba.config.NUMBA_NUM_THREADS
    if n > cap:
        log.warning("--threads %d exceeds the pool size %d; capping", n, cap)
    numba.set_num_threads(min(n, cap))


def main(argv=None) -> int:
    from .config import load_config, schema_doc
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.help_config:
        sys.stdout.write(schema_doc())
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    run = None
    try:
        cfg = load_config(args.config)
        _set_threads(args.threads)
        run = Run(args, cfg)
        code = COMMANDS[args.command](run)
        run.sidecar("ok")
        return code
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        if run:
            run.sidecar("validation-error")
        return 1
    except AcceptanceFailure as exc:
        sys.stderr.write(f"acceptance failure: {exc}\n")
        if run:
            run.sidecar("acceptance-failure")
        return 2
    except KineticError as exc:      # pragma: no cover - every subclass is handled above
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())


def main_exit() -> None:
    """Console-script wrapper that turns the return code into the exit status."""
    sys.exit(main())
