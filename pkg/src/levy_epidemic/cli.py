"""Command-line front end: config parsing, task orchestration, persistence.

Configs are JSON with nested sections; every key is validated against
the selected model and task and unknown keys are rejected before any
computation.  All file outputs (trajectory CSV, verdict CSV, summary
JSON) are byte-identical across reruns with the same config and seed.

Exit codes: 0 success, 2 config error, 3 numerical/analysis failure.
Errors are reported as a single JSON line on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .analysis import (EnsembleSummary, ExitProblem, dynkin_generator_check,
                       estimate_extinction, estimate_hitting_time,
                       mc_exit_probability, solve_exit_probability)
from .errors import (ConditionNotApplicableError, ConfigError,
                     InfeasibleConstantsError, LevyEpidemicError,
                     NumericalFailureError)
from .figures import PANELS, stochastic_verdict, verdict_table
from .integrator import BOUNDARY_POLICIES, SimConfig, Trajectory, simulate_path
from .jumps import (ConstantJump, DiscreteMarks, JumpSpec, PiecewiseLinearJump,
                    PointMass, UniformMarks)
from .models import SimplexState, SisParams, SirsParams
from .rng import RngStream
from .stability import find_lyapunov_constants

DEFAULT_SEED = 12345
FIGURE_T_END = 500.0
FIGURE_DT = 1e-3
FIGURE_RECORD_STRIDE = 500

MODELS = ("sis", "sirs", "sis_deterministic", "sirs_deterministic")
TASKS = ("simulate", "ensemble", "stability", "exit_prob",
         "generator_check", "reproduce_figures")

_DEFAULT_X0 = {"sis": (0.6, 0.4), "sirs": (0.3, 0.6, 0.1)}


# ---------------------------------------------------------------------------
# Config schema
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description.

    ``params`` is None only for the reproduce_figures task.  Optional
    task arguments not supplied in the config are None here; task
    runners substitute their documented defaults.
    """

    task: str
    model: str | None
    params: SisParams | SirsParams | None
    sim: SimConfig
    x0: SimplexState | None
    n_paths: int | None = None
    i_threshold: float | None = None
    epsilon: float | None = None
    x1: float | None = None
    x2: float | None = None
    grid_n: int | None = None
    dt_probe: float | None = None
    n_samples: int | None = None

    def to_dict(self) -> dict:
        """Canonical JSON-serializable form; re-parsing it is identity."""
        out: dict = {"task": self.task, "sim": _sim_to_dict(self.sim)}
        if self.model is not None:
            out["model"] = self.model
            out["params"] = _params_to_dict(self.model, self.params)
            if self.params.jumps.total_mass > 0.0:
                out["jumps"] = _jumps_to_dict(self.params.jumps)
            out["x0"] = list(self.x0.coords)
        for key in ("n_paths", "i_threshold", "epsilon", "x1", "x2",
                    "grid_n", "dt_probe", "n_samples"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def _fail(msg: str) -> ConfigError:
    return ConfigError(msg)


def _check_keys(block: dict, spec: dict[str, bool], where: str) -> None:
    unknown = set(block) - set(spec)
    if unknown:
        raise _fail(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = [k for k, required in spec.items() if required and k not in block]
    if missing:
        raise _fail(f"{where}: missing required key(s) {missing}")


def _number(block: dict, key: str, where: str, default=None) -> float:
    if key not in block:
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


def _integer(block: dict, key: str, where: str, default=None):
    if key not in block:
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(f"{where}.{key}: expected an integer, got {value!r}")
    return value


def _build_jumps(block: dict | None) -> JumpSpec:
    if block is None:
        return JumpSpec.constant(0.0, 0.0)
    _check_keys(block, {"mass": True, "marks": False, "function": False}, "jumps")
    mass = _number(block, "mass", "jumps")
    marks_block = block.get("marks", {"type": "point_mass", "y0": 0.0})
    fn_block = block.get("function", {"type": "constant", "c": 0.0})
    if not isinstance(marks_block, dict) or not isinstance(fn_block, dict):
        raise _fail("jumps.marks and jumps.function must be objects")
    mtype = marks_block.get("type")
    if mtype == "point_mass":
        _check_keys(marks_block, {"type": True, "y0": False}, "jumps.marks")
        marks = PointMass(_number(marks_block, "y0", "jumps.marks", 0.0))
    elif mtype == "uniform":
        _check_keys(marks_block, {"type": True, "a": True, "b": True}, "jumps.marks")
        marks = UniformMarks(_number(marks_block, "a", "jumps.marks"),
                             _number(marks_block, "b", "jumps.marks"))
    elif mtype == "discrete":
        _check_keys(marks_block, {"type": True, "points": True}, "jumps.marks")
        points = marks_block["points"]
        if (not isinstance(points, list)
                or any(not isinstance(p, list) or len(p) != 2 for p in points)):
            raise _fail("jumps.marks.points must be a list of [value, prob] pairs")
        marks = DiscreteMarks(values=tuple(float(p[0]) for p in points),
                              probs=tuple(float(p[1]) for p in points))
    else:
        raise _fail(f"jumps.marks.type must be point_mass|uniform|discrete, got {mtype!r}")
    ftype = fn_block.get("type")
    if ftype == "constant":
        _check_keys(fn_block, {"type": True, "c": True}, "jumps.function")
        fn = ConstantJump(_number(fn_block, "c", "jumps.function"))
    elif ftype == "piecewise_linear":
        _check_keys(fn_block, {"type": True, "knots": True, "values": True},
                    "jumps.function")
        fn = PiecewiseLinearJump(knots=tuple(float(v) for v in fn_block["knots"]),
                                 values=tuple(float(v) for v in fn_block["values"]))
    else:
        raise _fail(f"jumps.function.type must be constant|piecewise_linear, got {ftype!r}")
    return JumpSpec(total_mass=mass, marks=marks, jump=fn)


def _jumps_to_dict(spec: JumpSpec) -> dict:
    out: dict = {"mass": spec.total_mass}
    if isinstance(spec.marks, PointMass):
        out["marks"] = {"type": "point_mass", "y0": spec.marks.value}
    elif isinstance(spec.marks, UniformMarks):
        out["marks"] = {"type": "uniform", "a": spec.marks.low, "b": spec.marks.high}
    else:
        out["marks"] = {"type": "discrete",
                        "points": [[v, p] for v, p in zip(spec.marks.values, spec.marks.probs)]}
    if isinstance(spec.jump, ConstantJump):
        out["function"] = {"type": "constant", "c": spec.jump.value}
    else:
        out["function"] = {"type": "piecewise_linear",
                           "knots": list(spec.jump.knots),
                           "values": list(spec.jump.values)}
    return out


def _build_params(model: str, block: dict, jumps: JumpSpec):
    deterministic = model.endswith("_deterministic")
    base = model.split("_")[0]
    if base == "sis":
        spec = {"beta": True, "mu": True, "lambda": True, "sigma": not deterministic}
    else:
        spec = {"beta": True, "lambda": True, "delta": True, "sigma": not deterministic}
    if deterministic:
        spec["sigma"] = False
    _check_keys(block, spec, "params")
    sigma = _number(block, "sigma", "params", 0.0)
    if deterministic:
        if sigma != 0.0:
            raise _fail(f"params.sigma must be 0 for {model}, got {sigma}")
        if jumps.total_mass != 0.0:
            raise _fail(f"jumps.mass must be 0 for {model}, got {jumps.total_mass}")
    try:
        if base == "sis":
            return SisParams(beta=_number(block, "beta", "params"),
                             mu=_number(block, "mu", "params"),
                             lam=_number(block, "lambda", "params"),
                             sigma=sigma, jumps=jumps)
        return SirsParams(beta=_number(block, "beta", "params"),
                          lam=_number(block, "lambda", "params"),
                          delta=_number(block, "delta", "params"),
                          sigma=sigma, jumps=jumps)
    except ValueError as exc:
        raise _fail(f"params: {exc}") from exc


def _params_to_dict(model: str, params) -> dict:
    if model.startswith("sis"):
        out = {"beta": params.beta, "mu": params.mu, "lambda": params.lam}
    else:
        out = {"beta": params.beta, "lambda": params.lam, "delta": params.delta}
    if not model.endswith("_deterministic"):
        out["sigma"] = params.sigma
    return out


def _build_sim(block: dict | None) -> SimConfig:
    block = block or {}
    _check_keys(block, {"t_end": False, "dt": False, "seed": False,
                        "record_stride": False, "boundary_policy": False}, "sim")
    policy = block.get("boundary_policy", "clamp")
    if policy not in BOUNDARY_POLICIES:
        raise _fail(f"sim.boundary_policy must be one of {BOUNDARY_POLICIES}, got {policy!r}")
    try:
        return SimConfig(
            t_end=_number(block, "t_end", "sim", FIGURE_T_END),
            dt=_number(block, "dt", "sim", FIGURE_DT),
            seed=_integer(block, "seed", "sim", DEFAULT_SEED),
            boundary_policy=policy,
            record_stride=_integer(block, "record_stride", "sim", 1),
        )
    except ValueError as exc:
        raise _fail(f"sim: {exc}") from exc


def _sim_to_dict(sim: SimConfig) -> dict:
    return {"t_end": sim.t_end, "dt": sim.dt, "seed": sim.seed,
            "record_stride": sim.record_stride,
            "boundary_policy": sim.boundary_policy}


_TASK_KEYS = {
    "simulate": set(),
    "ensemble": {"n_paths", "i_threshold", "epsilon"},
    "stability": set(),
    "exit_prob": {"x1", "x2", "grid_n", "n_paths"},
    "generator_check": {"dt_probe", "n_samples"},
    "reproduce_figures": set(),
}
_TASK_REQUIRED = {
    "ensemble": {"n_paths", "i_threshold"},
    "exit_prob": {"x1", "x2"},
}


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a raw config mapping into an ExperimentConfig.

    Raises:
        ConfigError: On any unknown key, missing key, wrong type, or
            value outside its documented domain.
    """
    if not isinstance(data, dict):
        raise _fail("config root must be a JSON object")
    task = data.get("task")
    if task not in TASKS:
        raise _fail(f"task must be one of {TASKS}, got {task!r}")
    base_keys = {"task": True, "sim": False}
    if task == "reproduce_figures":
        _check_keys(data, base_keys, "config")
        return ExperimentConfig(task=task, model=None, params=None,
                                sim=_build_sim(data.get("sim")), x0=None)
    base_keys.update({"model": True, "params": True, "jumps": False, "x0": False})
    for key in _TASK_KEYS[task]:
        base_keys[key] = key in _TASK_REQUIRED.get(task, set())
    _check_keys(data, base_keys, "config")
    model = data["model"]
    if model not in MODELS:
        raise _fail(f"model must be one of {MODELS}, got {model!r}")
    if not isinstance(data["params"], dict):
        raise _fail("params must be an object")
    jumps = _build_jumps(data.get("jumps"))
    params = _build_params(model, data["params"], jumps)
    sim = _build_sim(data.get("sim"))
    dim = 2 if isinstance(params, SisParams) else 3
    x0_raw = data.get("x0", list(_DEFAULT_X0[model.split("_")[0]]))
    if not isinstance(x0_raw, list) or len(x0_raw) != dim:
        raise _fail(f"x0 must be a list of {dim} frequencies")
    try:
        x0 = SimplexState(tuple(float(v) for v in x0_raw))
    except (TypeError, ValueError) as exc:
        raise _fail(f"x0: {exc}") from exc
    cfg = ExperimentConfig(
        task=task, model=model, params=params, sim=sim, x0=x0,
        n_paths=_integer(data, "n_paths", "config"),
        i_threshold=_number(data, "i_threshold", "config"),
        epsilon=_number(data, "epsilon", "config"),
        x1=_number(data, "x1", "config"),
        x2=_number(data, "x2", "config"),
        grid_n=_integer(data, "grid_n", "config"),
        dt_probe=_number(data, "dt_probe", "config"),
        n_samples=_integer(data, "n_samples", "config"),
    )
    if task == "exit_prob":
        if not isinstance(params, SisParams):
            raise _fail("exit_prob is defined for the SIS models only")
        if not cfg.x1 < x0.s < cfg.x2:
            raise _fail(f"exit_prob needs x1 < x0[0] < x2, got {cfg.x1} / {x0.s} / {cfg.x2}")
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(f"cannot read config {path}: {exc}") from exc
    if not text.strip():
        raise _fail(f"config {path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)


# ---------------------------------------------------------------------------
# Output writers
# ---------------------------------------------------------------------------


def write_trajectory_csv(path, traj: Trajectory) -> None:
    """Write a trajectory as `t,S,I[,R],jumped` with t to 6 decimals."""
    header = "t,S,I,jumped" if traj.model == "sis" else "t,S,I,R,jumped"
    lines = [header]
    for t, state, jumped in zip(traj.times, traj.states, traj.jumped):
        coords = ",".join(format(v, ".12g") for v in state)
        lines.append(f"{t:.6f},{coords},{int(jumped)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def _summary_of(summary: EnsembleSummary) -> dict:
    out = {"n_paths": summary.n_paths, "censored_count": summary.censored_count}
    if summary.extinction_fraction is not None:
        out["extinction_fraction"] = summary.extinction_fraction
        out["ci_low"] = summary.ci_low
        out["ci_high"] = summary.ci_high
        out["terminal_quantiles"] = {"q05": summary.terminal_quantiles[0],
                                     "q50": summary.terminal_quantiles[1],
                                     "q95": summary.terminal_quantiles[2]}
    if summary.mean_hitting_time is not None:
        out["mean_hitting_time"] = summary.mean_hitting_time
        out["hitting_time_se"] = summary.hitting_time_se
    return out


# ---------------------------------------------------------------------------
# Task runners
# ---------------------------------------------------------------------------


def _run_simulate(cfg: ExperimentConfig, out_dir: Path, threads: int) -> None:
    traj = simulate_path(cfg.params, cfg.x0, cfg.sim)
    write_trajectory_csv(out_dir / "trajectory.csv", traj)
    terminal = dict(zip("SIR", traj.states[-1]))
    write_json(out_dir / "summary.json", {
        "task": "simulate",
        "terminal": terminal,
        "clamp_count": traj.clamp_count,
        "sum_error_max": traj.sum_error_max,
        "jump_count": len(traj.jump_marks),
    })


def _run_ensemble(cfg: ExperimentConfig, out_dir: Path, threads: int) -> None:
    payload: dict = {"task": "ensemble"}
    summary = estimate_extinction(cfg.params, cfg.x0, cfg.sim, cfg.n_paths,
                                  cfg.i_threshold, threads=threads)
    payload["extinction"] = _summary_of(summary)
    if cfg.epsilon is not None:
        hitting = estimate_hitting_time(cfg.params, cfg.x0, cfg.epsilon,
                                        cfg.sim, cfg.n_paths, threads=threads)
        payload["hitting_time"] = _summary_of(hitting)
    write_json(out_dir / "summary.json", payload)


def _run_stability(cfg: ExperimentConfig, out_dir: Path, threads: int) -> None:
    verdict = stochastic_verdict(cfg.params)
    payload = {
        "task": "stability",
        "model": cfg.model,
        "beta": verdict.beta,
        "condition_holds": verdict.condition_holds,
        "threshold": verdict.threshold_value,
        "margin": verdict.margin,
        "detail": verdict.detail,
        "info": {k: v for k, v in verdict.info.items() if not math.isnan(v)},
    }
    if isinstance(cfg.params, SirsParams) and verdict.condition_holds:
        constants = find_lyapunov_constants(cfg.params)
        payload["lyapunov_constants"] = {"c1": constants.c1, "c2": constants.c2,
                                         "c3": constants.c3, "kappa": constants.kappa}
    write_json(out_dir / "summary.json", payload)


def _run_exit_prob(cfg: ExperimentConfig, out_dir: Path, threads: int) -> None:
    prob = ExitProblem(params=cfg.params, x1=cfg.x1, x2=cfg.x2, x0=cfg.x0.s,
                       grid_n=cfg.grid_n or 2001)
    solution = solve_exit_probability(prob)
    lines = ["x,u"] + [f"{x:.6f},{u:.12g}" for x, u in zip(solution.xs, solution.u)]
    (out_dir / "exit_profile.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    payload: dict = {"task": "exit_prob", "x0": prob.x0, "x1": prob.x1,
                     "x2": prob.x2, "grid_n": prob.grid_n,
                     "pi_up_pide": solution.pi_up}
    if cfg.n_paths:
        mc = mc_exit_probability(prob, None, cfg.sim, cfg.n_paths, threads=threads)
        payload["pi_up_mc"] = mc.pi_up
        payload["mc_std_error"] = mc.std_error
        payload["mc_censored"] = mc.censored_count
    write_json(out_dir / "summary.json", payload)


def _run_generator_check(cfg: ExperimentConfig, out_dir: Path, threads: int) -> None:
    constants = None
    if isinstance(cfg.params, SirsParams):
        constants = find_lyapunov_constants(cfg.params)
    check = dynkin_generator_check(
        cfg.params, cfg.x0,
        dt_probe=cfg.dt_probe or 1e-3,
        n_samples=cfg.n_samples or 100_000,
        stream=RngStream(cfg.sim.seed, 0),
        constants=constants)
    write_json(out_dir / "summary.json", {
        "task": "generator_check",
        "mc_estimate": check.mc_estimate,
        "analytic": check.analytic,
        "std_error": check.std_error,
        "z_score": check.z_score,
        "n_samples": check.n_samples,
    })


def reproduce_figures(out_dir, seed: int = DEFAULT_SEED, threads: int = 1) -> None:
    """Re-simulate the six reference panels and write their artifacts.

    Writes one trajectory CSV per panel (fig1a.csv .. fig3b.csv), the
    stability verdict table (verdicts.csv with columns
    panel,beta,threshold,holds), and summary.json.  Panel k uses stream
    (seed, k), so output is reproducible byte for byte.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sim = SimConfig(t_end=FIGURE_T_END, dt=FIGURE_DT, seed=seed,
                    record_stride=FIGURE_RECORD_STRIDE)
    panel_summaries = {}
    for index, panel in enumerate(PANELS.values()):
        stream = RngStream(seed, index)
        traj = simulate_path(panel.params, panel.x0, sim, stream)
        write_trajectory_csv(out / f"{panel.name}.csv", traj)
        terminal = dict(zip("SIR", traj.states[-1]))
        panel_summaries[panel.name] = {
            "terminal": terminal,
            "clamp_count": traj.clamp_count,
            "sum_error_max": traj.sum_error_max,
            "jump_count": len(traj.jump_marks),
            "title": panel.title,
        }
    rows = verdict_table()
    verdict_lines = ["panel,beta,threshold,holds"]
    verdict_lines += [
        f"{r.panel},{r.beta:.12g},{r.threshold:.12g},{'true' if r.holds else 'false'}"
        for r in rows
    ]
    (out / "verdicts.csv").write_text("\n".join(verdict_lines) + "\n", encoding="utf-8")
    write_json(out / "summary.json", {
        "task": "reproduce_figures",
        "seed": seed,
        "t_end": sim.t_end,
        "dt": sim.dt,
        "panels": panel_summaries,
        "verdicts": [{"panel": r.panel, "beta": r.beta, "threshold": r.threshold,
                      "holds": r.holds, "rule": r.rule} for r in rows],
    })


_RUNNERS = {
    "simulate": _run_simulate,
    "ensemble": _run_ensemble,
    "stability": _run_stability,
    "exit_prob": _run_exit_prob,
    "generator_check": _run_generator_check,
}


def run(config_path, output_dir, seed: int | None = None, threads: int = 1) -> int:
    """Execute a config file; returns the process exit code."""
    try:
        cfg = load_config(config_path)
        if seed is not None:
            cfg = dataclasses.replace(cfg, sim=dataclasses.replace(cfg.sim, seed=seed))
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        if cfg.task == "reproduce_figures":
            reproduce_figures(out, seed=cfg.sim.seed, threads=threads)
            return 0
        _RUNNERS[cfg.task](cfg, out, threads)
        return 0
    except (ConfigError, ValueError) as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except (NumericalFailureError, InfeasibleConstantsError,
            ConditionNotApplicableError) as exc:
        print(json.dumps({"error": "numerical", "message": str(exc)}), file=sys.stderr)
        return 3
    except LevyEpidemicError as exc:
        print(json.dumps({"error": "internal", "message": str(exc)}), file=sys.stderr)
        return 1


def main(argv=None) -> None:
    """Entry point for the ``levy-epidemic`` console script."""
    parser = argparse.ArgumentParser(
        prog="levy-epidemic",
        description="Simulate jump-diffusion SIS/SIRS systems and evaluate "
                    "disease-free-equilibrium stability conditions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a JSON experiment config")
    p_run.add_argument("--config", required=True, help="path to config JSON")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override sim.seed")
    p_run.add_argument("--threads", type=int, default=1,
                       help="worker threads for path ensembles")

    p_fig = sub.add_parser("reproduce-figures",
                           help="re-simulate the six reference panels")
    p_fig.add_argument("--out", required=True, help="output directory")
    p_fig.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_fig.add_argument("--threads", type=int, default=1)

    args = parser.parse_args(argv)
    if args.command == "run":
        code = run(args.config, args.out, seed=args.seed, threads=args.threads)
    else:
        try:
            reproduce_figures(args.out, seed=args.seed, threads=args.threads)
            code = 0
        except LevyEpidemicError as exc:
            print(json.dumps({"error": "numerical", "message": str(exc)}),
                  file=sys.stderr)
            code = 3
    sys.exit(code)
