"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a single `[PASS]`/`[FAIL]` line for its criterion before
asserting, so the suite output doubles as the acceptance report.  Seeds
are pinned throughout; every expected value is closed-form arithmetic or
was computed from the stated independent oracle.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from scipy.integrate import quad

from levy_epidemic import (ExitProblem, JumpSpec, PANELS, RngStream,
                           SimConfig, SimplexState, SirsParams, SisParams,
                           dynkin_generator_check, estimate_extinction,
                           estimate_hitting_time, find_lyapunov_constants,
                           mc_exit_probability, simulate_path,
                           solve_exit_probability, verdict_table)
from levy_epidemic.cli import reproduce_figures, run
from levy_epidemic.integrator import _simulate_raw, _validate_x0

THREADS = 4

EXPECTED_VERDICTS = {
    "fig1a": (0.49, True),
    "fig1b": (0.40, True),
    "fig2a": (0.35, False),
    "fig2b": (0.30, False),
    "fig3a": (0.40, True),
    "fig3b": (0.10, False),
}


def _report(criterion: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f" :: {detail}" if detail else ""))


# ---------------------------------------------------------------------------
# 1. Threshold table (closed form, 1e-12)
# ---------------------------------------------------------------------------


def test_criterion_1_threshold_table():
    rows = {r.panel: r for r in verdict_table()}
    failures = []
    for panel, (threshold, holds) in EXPECTED_VERDICTS.items():
        row = rows[panel]
        if abs(row.threshold - threshold) > 1e-12 or row.holds != holds:
            failures.append(f"{panel}: got ({row.threshold}, {row.holds}), "
                            f"want ({threshold}, {holds})")
    ok = not failures
    _report("1. threshold table", ok, "; ".join(failures) or
            "six verdicts and thresholds exact")
    assert ok, failures


# ---------------------------------------------------------------------------
# 2. Deterministic limit (1e-3 by t = 500 at dt = 1e-3)
# ---------------------------------------------------------------------------


def test_criterion_2_deterministic_limit():
    cfg = SimConfig(t_end=500.0, dt=1e-3, seed=0, record_stride=500_000)
    sis = SisParams(beta=0.8, mu=0.1, lam=0.2, sigma=0.0,
                    jumps=JumpSpec.constant(0.0, 0.0))
    sis_term = simulate_path(sis, SimplexState.sis(0.6, 0.4), cfg).states[-1]
    sis_err = float(np.max(np.abs(sis_term - np.array([0.375, 0.625]))))

    sirs = SirsParams(beta=0.8, lam=0.1, delta=0.1, sigma=0.0,
                      jumps=JumpSpec.constant(0.0, 0.0))
    sirs_term = simulate_path(sirs, SimplexState.sirs(0.3, 0.6, 0.1), cfg).states[-1]
    sirs_err = float(np.max(np.abs(sirs_term - np.array([0.125, 0.4375, 0.4375]))))

    ok = sis_err < 1e-3 and sirs_err < 1e-3
    _report("2. deterministic limit", ok,
            f"SIS err {sis_err:.2e}, SIRS err {sirs_err:.2e} (tol 1e-3)")
    assert ok


# ---------------------------------------------------------------------------
# 3. Simplex conservation (100 paths x 6 panels)
# ---------------------------------------------------------------------------


def test_criterion_3_simplex_conservation():
    cfg = SimConfig(t_end=500.0, dt=1e-3, seed=2001)
    worst_err = 0.0
    clamps = 0
    substeps = 0

    def one(args):
        panel, i = args
        x0 = _validate_x0(panel.params, panel.x0)
        return _simulate_raw(panel.params, x0, cfg, RngStream(cfg.seed, i),
                             record=False)

    jobs = [(panel, 100 * pi + i)
            for pi, panel in enumerate(PANELS.values()) for i in range(100)]
    with ThreadPoolExecutor(max_workers=THREADS) as pool:
        for raw in pool.map(one, jobs):
            worst_err = max(worst_err, raw.sum_error_max)
            clamps += raw.clamp_count
            substeps += raw.n_substeps
    clamp_rate = clamps / substeps
    ok = worst_err < 1e-9 and clamp_rate < 1e-3
    _report("3. simplex conservation", ok,
            f"max |sum-1| {worst_err:.2e} (tol 1e-9), "
            f"clamp rate {clamp_rate:.2e} (tol 1e-3)")
    assert ok


# ---------------------------------------------------------------------------
# 4. Stability-to-dynamics consistency (1000 paths per panel, t_end = 500)
# ---------------------------------------------------------------------------


def test_criterion_4_stability_dynamics_consistency():
    holds = {panel: verdict for panel, (_, verdict) in EXPECTED_VERDICTS.items()}
    cfg = SimConfig(t_end=500.0, dt=1e-3, seed=4001)
    lines = []
    ok = True
    for name, panel in PANELS.items():
        summary = estimate_extinction(panel.params, panel.x0, cfg,
                                      n_paths=1000, i_threshold=0.01,
                                      threads=THREADS)
        median = summary.terminal_quantiles[1]
        if holds[name]:
            passed = summary.extinction_fraction >= 0.95
            lines.append(f"{name}: extinct {summary.extinction_fraction:.3f}"
                         f" (need >= 0.95) {'ok' if passed else 'FAIL'}")
        else:
            passed = median > 0.05
            lines.append(f"{name}: median I {median:.4f}"
                         f" (need > 0.05) {'ok' if passed else 'FAIL'}")
        ok = ok and passed
    _report("4. stability-to-dynamics consistency", ok, "; ".join(lines))
    assert ok, lines


# ---------------------------------------------------------------------------
# 5. Generator cross-check (|z| < 3, n = 1e5, dt_probe = 1e-3)
# ---------------------------------------------------------------------------


def test_criterion_5_generator_crosscheck():
    lines = []
    ok = True
    sis = PANELS["fig1a"].params
    for k, s in enumerate((0.15, 0.3, 0.5, 0.65, 0.8)):
        check = dynkin_generator_check(sis, SimplexState.sis(s), dt_probe=1e-3,
                                       n_samples=100_000,
                                       stream=RngStream(777, k))
        ok = ok and abs(check.z_score) < 3.0
        lines.append(f"sis s={s}: z={check.z_score:+.2f}")
    sirs = PANELS["fig3a"].params
    constants = find_lyapunov_constants(sirs)
    states = ((0.3, 0.6, 0.1), (0.5, 0.3, 0.2), (0.2, 0.4, 0.4),
              (0.6, 0.2, 0.2), (0.25, 0.25, 0.5))
    for k, x in enumerate(states):
        check = dynkin_generator_check(sirs, SimplexState.sirs(*x), dt_probe=1e-3,
                                       n_samples=100_000,
                                       stream=RngStream(888, k),
                                       constants=constants)
        ok = ok and abs(check.z_score) < 3.0
        lines.append(f"sirs x={x}: z={check.z_score:+.2f}")
    _report("5. generator cross-check", ok, "; ".join(lines))
    assert ok, lines


# ---------------------------------------------------------------------------
# 6. Hitting-time proxy (500 paths, eps = 0.05, t_end = 2000)
# ---------------------------------------------------------------------------


def test_criterion_6_hitting_time_proxy():
    panel = PANELS["fig1a"]
    cfg = SimConfig(t_end=2000.0, dt=1e-3, seed=321)
    summary = estimate_hitting_time(panel.params, panel.x0, 0.05, cfg,
                                    n_paths=500, threads=THREADS)
    censored_frac = summary.censored_count / summary.n_paths
    se_frac = summary.hitting_time_se / summary.mean_hitting_time
    ok = censored_frac < 0.05 and se_frac < 0.10
    _report("6. hitting-time proxy", ok,
            f"mean {summary.mean_hitting_time:.3f}, censored {censored_frac:.3%} "
            f"(tol 5%), SE/mean {se_frac:.3%} (tol 10%)")
    assert ok


# ---------------------------------------------------------------------------
# 7. Exit-probability cross-validation
# ---------------------------------------------------------------------------


BALANCED = dict(beta=0.5, mu=0.05, lam=0.05, sigma=1.0)
EXIT_CONFIGS = (
    ("no-jump", JumpSpec.constant(0.0, 0.0), 2024),
    ("negative-jump fig1a-style", JumpSpec.constant(1.0, -0.08), 2025),
    ("positive-jump fig1b-style", JumpSpec.constant(0.5, 0.1), 2026),
)


def test_criterion_7_exit_probability_crossvalidation():
    lines = []
    ok = True
    for label, jumps, seed in EXIT_CONFIGS:
        params = SisParams(**BALANCED, jumps=jumps)
        prob = ExitProblem(params=params, x1=0.2, x2=0.95, x0=0.6, grid_n=2001)
        sol = solve_exit_probability(prob)
        cfg = SimConfig(t_end=60.0, dt=1e-3, seed=seed)
        mc = mc_exit_probability(prob, None, cfg, 10_000, threads=THREADS)
        tol = max(0.02, 3.0 * mc.std_error)
        gap = abs(sol.pi_up - mc.pi_up)
        passed = gap < tol and mc.censored_count == 0
        ok = ok and passed
        lines.append(f"{label}: pide {sol.pi_up:.4f} mc {mc.pi_up:.4f} "
                     f"gap {gap:.4f} (tol {tol:.4f})")

    # classical scale-function oracle for the no-jump configuration
    params = SisParams(**BALANCED, jumps=JumpSpec.constant(0.0, 0.0))
    sol = solve_exit_probability(
        ExitProblem(params=params, x1=0.2, x2=0.95, x0=0.6, grid_n=2001))

    def log_density(xi):
        val, _ = quad(lambda z: 2.0 * (1 - z) * (0.1 - 0.5 * z)
                      / (z * z * (1 - z) * (1 - z)), 0.6, xi, limit=200)
        return val

    def scale(x):
        val, _ = quad(lambda xi: math.exp(-log_density(xi)), 0.2, x, limit=300)
        return val

    denom = scale(0.95)
    worst = max(abs(float(np.interp(x, sol.xs, sol.u)) - scale(x) / denom)
                for x in (0.3, 0.45, 0.6, 0.75, 0.9))
    oracle_ok = worst < 1e-3
    ok = ok and oracle_ok
    lines.append(f"scale-function oracle max gap {worst:.2e} (tol 1e-3)")
    _report("7. exit-probability cross-validation", ok, "; ".join(lines))
    assert ok, lines


# ---------------------------------------------------------------------------
# 8. Determinism of file outputs
# ---------------------------------------------------------------------------


def test_criterion_8_determinism(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    reproduce_figures(a, seed=12345)
    reproduce_figures(b, seed=12345)
    names = sorted(p.name for p in a.iterdir())
    byte_identical = all((a / n).read_bytes() == (b / n).read_bytes() for n in names)

    ensemble_cfg = {
        "model": "sis",
        "params": {"beta": 0.4, "mu": 0.15, "lambda": 0.3, "sigma": 0.3},
        "jumps": {"mass": 1.0, "function": {"type": "constant", "c": -0.1}},
        "sim": {"t_end": 5.0, "dt": 0.001, "seed": 64},
        "task": "ensemble",
        "n_paths": 64,
        "i_threshold": 0.05,
    }
    cfg_path = tmp_path / "ens.json"
    cfg_path.write_text(json.dumps(ensemble_cfg), encoding="utf-8")
    assert run(cfg_path, tmp_path / "t1", threads=1) == 0
    assert run(cfg_path, tmp_path / "t8", threads=8) == 0
    threads_identical = ((tmp_path / "t1" / "summary.json").read_bytes()
                         == (tmp_path / "t8" / "summary.json").read_bytes())

    ok = byte_identical and threads_identical
    _report("8. determinism", ok,
            f"reproduce-figures byte-identical: {byte_identical}; "
            f"threads 1 vs 8 summary identical: {threads_identical}")
    assert ok
