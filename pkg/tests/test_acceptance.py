"""Acceptance criteria 1-10 at their stated tolerances.

Each test prints one ``criterion k: PASS|FAIL`` line (repeated in the
terminal summary). Criteria 2, 4 and 8 run through the command-line entry
point so that criterion 10 can repeat them in a subprocess with a different
thread count and compare the result files byte for byte.

Runtime on one core is roughly 45 minutes for criteria 1-9 and the same again
for criterion 10.
"""
import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

from kinetic_hls import exponents as X
from kinetic_hls.cli import main
from kinetic_hls.quadrature import build_hemisphere_quadrature

pytestmark = pytest.mark.slow

SEED = 20240611
CORES = os.cpu_count() or 1
RUNS = {}          # criterion -> list of (argv, out_dir) replayed by criterion 10


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def _emit(log, k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    log.append(line)


def _cli(k, work, name, config_text, argv):
    d = work / f"c{k}" / name
    d.mkdir(parents=True, exist_ok=True)
    cfg = d / "run.cfg"
    cfg.write_text(config_text)
    args = argv + ["--config", str(cfg), "--seed", str(SEED), "--threads", "1", "--out", str(d / "out")]
    code = main(args)
    RUNS.setdefault(k, []).append((args, d))
    return code, d / "out"


def _json(path):
    return json.loads(Path(path).read_text())["result"]


# --------------------------------------------------------------------------- 1

def test_criterion_01_hemisphere_quadrature(acceptance_log):
    t0 = time.perf_counter()
    exact = {0: 2 * math.pi, 1: math.pi, 2: 2 * math.pi / 3, 3: math.pi / 2}
    worst = 0.0
    for n_mu in (4, 6, 8, 12, 16):
        q = build_hemisphere_quadrature(n_mu, 16)
        for k, v in exact.items():
            worst = max(worst, abs(q.integrate(lambda w: w[:, 2] ** k) - v))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    _emit(acceptance_log, 1, ok, f"max error {worst:.2e} (tol 1e-12), {dt:.3f} s")
    assert ok


# --------------------------------------------------------------------------- 2

GAMMAS_C2 = ("0", "1/2", "1")


def test_criterion_02_conservation(work, acceptance_log):
    t0 = time.perf_counter()
    maxd, shrink = {}, {}
    for g in GAMMAS_C2:
        d = {}
        for n in (12, 16):
            text = (f"kernel.gamma = {g}\ngrid.R = 6\ngrid.n = {n}\nquad.n_mu = 4\nquad.n_phi = 8\n"
                    f"probe.kind = conservation\nfamily.count = 20\n")
            code, out = _cli(2, work, f"g{g.replace('/', '_')}_n{n}", text, ["hls-sweep"])
            assert code == 0
            d[n] = np.array(_json(out / "hls.json")["defects"])
        maxd[g] = float(d[16].max())
        shrink[g] = float(d[12].max() / d[16].max())
    dt = time.perf_counter() - t0
    budget = 300.0 * 8 / CORES
    ok = all(v <= 1e-2 for v in maxd.values()) and all(s >= 1.8 for s in shrink.values()) and dt < budget
    detail = "; ".join(f"gamma={g}: max defect {maxd[g]:.2e}, shrink {shrink[g]:.2f}x" for g in GAMMAS_C2)
    _emit(acceptance_log, 2, ok, f"{detail}; {dt:.0f} s (budget {budget:.0f} s on {CORES} core(s))")
    assert ok


# --------------------------------------------------------------------------- 3

def test_criterion_03_maxwellian_equilibrium(work, acceptance_log):
    t0 = time.perf_counter()
    text = "kernel.gamma = 1\ngrid.R = 6\ngrid.n = 16\nfamily.kind = gaussian\nfamily.sigma = 0.7071067811865476\n"
    code, out = _cli(3, work, "maxwellian", text, ["collide"])
    res = _json(out / "collide.json")["relative_residual_sup"]
    dt = time.perf_counter() - t0
    ok = code == 0 and res <= 1e-2 and dt < 120
    _emit(acceptance_log, 3, ok, f"||Q+ - Q-||_inf / ||Q-||_inf = {res:.2e} (tol 1e-2), {dt:.0f} s")
    assert ok


# --------------------------------------------------------------------------- 4

def test_criterion_04_scaling_sharpness(work, acceptance_log):
    t0 = time.perf_counter()
    worst, parts = 0.0, []
    for g, r in (("0", "3"), ("1", "6")):
        text = (f"kernel.gamma = {g}\ngrid.R = 6\ngrid.n = 16\nprobe.kind = scaling\nexponents.r = {r}\n"
                f"sweep.deltas = -1/3, 0, 1/3\nsweep.lambdas = 1/2, 1, 2, 4\nsweep.mode = dilate\n")
        code, out = _cli(4, work, f"g{g}", text, ["hls-sweep"])
        assert code == 0
        for lab, v in _json(out / "hls.json")["sweeps"].items():
            err = abs(v["slope"] - v["expected"])
            worst = max(worst, err)
            parts.append(f"g={g} d={v['delta']}: {v['slope']:+.4f}")
    dt = time.perf_counter() - t0
    ok = worst <= 0.05 and dt < 600
    _emit(acceptance_log, 4, ok, f"max |slope - 3 delta| = {worst:.1e} (tol 0.05); {', '.join(parts)}; {dt:.0f} s")
    assert ok


# --------------------------------------------------------------------------- 5

def test_criterion_05_moment_probe(work, acceptance_log):
    text = ("kernel.gamma = 1\ngrid.R = 6\ngrid.n = 16\nprobe.kind = moment\nexponents.ell = 2\n"
            "moment.r = 6\nmoment.norms = 0, 1, 2, 3, 4, 5\nfamily.sigma = 1\n")
    code, out = _cli(5, work, "moment", text, ["hls-sweep"])
    res = _json(out / "hls.json")
    ok = code == 0 and res["spread"] <= 10
    _emit(acceptance_log, 5, ok, f"spread {res['spread']:.3f} (tol 10); comparator trend {res['comparator_trend']} "
                                 f"(growth expected by the criterion's contrast; reported only)")
    assert ok


# --------------------------------------------------------------------------- 6

def test_criterion_06_exponent_algebra(work, acceptance_log):
    t0 = time.perf_counter()
    checks = {}
    checks["gamma1_unique_r"] = X.admissible_r_for_gamma(1, 72) == [F(1, 6)]
    w0, w1 = X.epsilon_window(0), X.epsilon_window(1)
    checks["window_gamma0"] = (w0.lower, w0.upper) == (0, F(1, 9))
    checks["window_gamma_half"] = (X.epsilon_window(F(1, 2)).lower, X.epsilon_window(F(1, 2)).upper) == (0, F(5, 72))
    d1 = w1.describe()
    checks["window_gamma1_readings"] = d1["strict_reading"] == "empty" and d1["closed_reading"] == "{1/36}"
    le = X.loss_exponent_set(1)
    kt = le.checks["second_kt"]
    checks["second_triplet"] = (le.second.as_tuple() == (F(1, 2), F(11, 30), F(21, 30)) and kt.admissible
                                and not kt.endpoint and le.a2 == F(15, 8))
    checks["uni_har"] = le.checks["uni_har"] == 2 / le.a2 == F(16, 15)
    code, out = _cli(6, work, "cli", "", ["exponents", "--gamma", "1", "--max-den", "72", "--check-r", "1/6"])
    csv = (out / "exponents.csv").read_text()
    checks["cli_emits_both_readings"] = code == 0 and "strict=empty" in csv and "closed={1/36}" in csv
    dt = time.perf_counter() - t0
    ok = all(checks.values()) and dt < 10
    failed = [k for k, v in checks.items() if not v]
    _emit(acceptance_log, 6, ok, f"{len(checks) - len(failed)}/{len(checks)} exact checks"
                                 f"{' (failed: ' + ', '.join(failed) + ')' if failed else ''}, {dt:.1f} s")
    assert ok


# --------------------------------------------------------------------------- 7

def test_criterion_07_symbol_asymptotics(work, acceptance_log):
    t0 = time.perf_counter()
    parts, ok = [], True
    for g in ("0", "1"):
        text = (f"kernel.gamma = {g}\nsymbol.mode = ray\nsymbol.method = reduced\nsymbol.theta0 = 1/4, 1/2, 3/4\n"
                f"symbol.s_min = 100\nsymbol.s_max = 10000\nsymbol.s_count = 9\n")
        code, out = _cli(7, work, f"g{g}", text, ["symbol"])
        ok &= code == 0
        for th, r in _json(out / "symbol.json")["rays"].items():
            slope = float(r["slope"])
            ok &= slope <= r["bound"]
            parts.append(f"g={g} th={float(th) / math.pi:.2f}pi: {r['status']} "
                         f"(raw {float(r['raw_slope']):+.2f}, rel {float(r['max_relative_residual']):.0e})")
    code, out = _cli(7, work, "partition", "symbol.mode = partition\n", ["symbol"])
    p = _json(out / "symbol.json")
    ok &= code == 0 and p["zeta_deviation"] <= 1e-10 and p["rho_deviation"] <= 1e-10
    dt = time.perf_counter() - t0
    ok &= dt < 600
    _emit(acceptance_log, 7, ok, f"{'; '.join(parts)}; partition dev {p['zeta_deviation']:.0e}/"
                                 f"{p['rho_deviation']:.0e}; {dt:.0f} s")
    assert ok


# --------------------------------------------------------------------------- 8 and 9

def _ks_config(gamma, slab):
    ell = 2 + 2 * float(F(gamma))
    text = (f"kernel.gamma = {gamma}\nquad.n_mu = 4\nquad.n_phi = 8\ntime.T = 2\ntime.dt = 0.1\n"
            f"solver.ell = {ell}\nsolver.eta = 0.01\nsolver.uniqueness = false\n")
    if slab:
        text += "space.d_x = 1\nspace.L = 20\nspace.n_x = 16\ngrid.R = 4\ngrid.n = 8\n"
    else:
        text += "space.d_x = 0\ngrid.R = 5\ngrid.n = 10\n"
    return text


def _bracket_checks(rep, mass=True):
    c = {
        "a_begin": rep["beginning_condition"]["g2_equals_g1_bitwise"]
                   and rep["beginning_condition"]["h2-h1"] >= -1e-10
                   and rep["beginning_condition"]["g2-h2"] >= -1e-10,
        "b_order": rep["min_ordering_defect"] >= -1e-10,
        "c_rho": max(rep["ratios"][1:]) <= 0.7 and rep["gap"] <= 1e-6 and len(rep["gaps"]) <= 15,
        "d_nonneg": rep["limit_min"] >= 0,
    }
    if mass:
        c["e_mass"] = rep["mass"]["within_budget"]
    return c


def test_criterion_08_ks_bracket(work, acceptance_log):
    parts, ok = [], True
    for g in ("0", "1"):
        t0 = time.perf_counter()
        code, out = _cli(8, work, f"hom_g{g}", _ks_config(g, False), ["solve-ks"])
        dt = time.perf_counter() - t0
        rep = _json(out / "report.json")
        c = _bracket_checks(rep)
        good = code == 0 and all(c.values()) and dt <= 600
        ok &= good
        parts.append(f"d_x=0 g={g}: gap {rep['gap']:.1e} in {len(rep['gaps'])} it, "
                     f"rho<={max(rep['ratios'][1:]):.2f}, drift {rep['mass']['max_relative_drift']:.1e}, "
                     f"{dt:.0f} s{'' if good else ' FAILED ' + str([k for k, v in c.items() if not v])}")
    t0 = time.perf_counter()
    code, out = _cli(8, work, "slab_g1", _ks_config("1", True), ["solve-ks"])
    dt = time.perf_counter() - t0
    rep = _json(out / "report.json")
    c = _bracket_checks(rep, mass=False)
    good = code == 0 and all(c.values()) and dt <= 1200
    ok &= good
    parts.append(f"slab g=1: gap {rep['gap']:.1e} in {len(rep['gaps'])} it, rho<={max(rep['ratios'][1:]):.2f}, "
                 f"{dt:.0f} s{'' if good else ' FAILED ' + str([k for k, v in c.items() if not v])}")
    _emit(acceptance_log, 8, ok, "; ".join(parts))
    assert ok


def test_criterion_09_scattering(work, acceptance_log):
    runs = [d for _, d in RUNS.get(8, []) if d.name == "slab_g1"]
    if not runs:
        pytest.skip("criterion 8 slab run missing")
    sc = _json(runs[0] / "out" / "report.json")["gain_only_scattering"]
    res = np.array(sc["residuals"], dtype=float)
    ok = sc["monotone"] and sc["half_ratio"] <= 0.1
    _emit(acceptance_log, 9, ok, f"monotone={sc['monotone']} (slack 1e-3), residual(T/2)/residual(0) = "
                                 f"{sc['half_ratio']:.3f} (tol 0.1), residual(0) = {res[0]:.2e}")
    assert ok


# --------------------------------------------------------------------------- 10

def _files(d):
    return {p.name: p.read_bytes() for p in sorted((d / "out").iterdir()) if p.name != "run.log"}


def test_criterion_10_determinism(work, acceptance_log):
    if not all(k in RUNS for k in (2, 4, 8)):
        pytest.skip("criteria 2, 4 and 8 must run first")
    env = dict(os.environ, NUMBA_NUM_THREADS="2")
    compared, diffs = 0, []
    for k in (2, 4, 8):
        for args, d in RUNS[k]:
            before = _files(d)
            rerun = list(args)
            i = rerun.index("--threads")
            rerun[i + 1] = "2"
            o = rerun.index("--out")
            rerun[o + 1] = str(d / "rerun")
            proc = subprocess.run([sys.executable, "-m", "kinetic_hls"] + rerun, env=env,
                                  capture_output=True, text=True)
            after = {p.name: p.read_bytes() for p in sorted((d / "rerun").iterdir()) if p.name != "run.log"}
            compared += len(before)
            if proc.returncode != 0 or before != after:
                diffs.append(f"c{k}/{d.name}")
    ok = not diffs
    _emit(acceptance_log, 10, ok, f"{compared} result files compared across 1 and 2 threads"
                                  f"{'; differing: ' + ', '.join(diffs) if diffs else ', all byte-identical'}")
    assert ok
