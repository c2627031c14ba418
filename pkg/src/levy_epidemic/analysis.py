"""Monte Carlo estimators and the exit-probability boundary-value solver.

Ensemble estimators assign path i the stream ``(seed, i)`` and reduce
with order-independent statistics, so results are identical for any
thread count or execution order.  The integro-differential exit solver
discretizes

    alpha(x) u' + (gamma^2(x)/2) u'' + int [u(x + h(y) x(1-x)) - u(x)] nu(dy) = 0

on (x1, x2) with absorbing extensions u = 0 on [0, x1] and u = 1 on
[x2, 1], and is cross-validated against a Monte Carlo first-exit oracle.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg
from scipy.stats import beta as _beta_dist

from . import _kernels
from .errors import NumericalFailureError
from .integrator import SimConfig, _simulate_raw, _validate_x0
from .jumps import jump_values, mark_nodes, sample_marks
from .models import SimplexState, SisParams, SirsParams, sis_drift, sis_diffusion
from .rng import RngStream
from .stability import LyapunovConstants, sis_generator_g, sirs_generator_f

UNIFORM_QUAD_NODES = 32


# ---------------------------------------------------------------------------
# Ensemble summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnsembleSummary:
    """Order-independent statistics of a path ensemble.

    Extinction runs fill the fraction/CI/quantile fields; hitting-time
    runs fill the mean/SE fields.  ``censored_count`` is the number of
    paths that did not hit before the horizon (always 0 for extinction
    runs, which have no hitting target).
    """

    n_paths: int
    censored_count: int = 0
    extinction_fraction: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    terminal_quantiles: tuple[float, float, float] | None = None
    mean_hitting_time: float | None = None
    hitting_time_se: float | None = None

    def __post_init__(self):
        if not self.n_paths >= 1:
            raise ValueError("n_paths must be >= 1")
        assert self.censored_count <= self.n_paths
        if self.ci_low is not None:
            assert 0.0 <= self.ci_low <= self.ci_high <= 1.0


def _binomial_ci(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Exact (Clopper-Pearson) binomial confidence interval."""
    tail = 0.5 * (1.0 - level)
    lo = 0.0 if k == 0 else float(_beta_dist.ppf(tail, k, n - k + 1))
    hi = 1.0 if k == n else float(_beta_dist.ppf(1.0 - tail, k + 1, n - k))
    return lo, hi


def _map_ordered(fn, n: int, threads: int) -> list:
    """Apply fn to 0..n-1 preserving index order, optionally threaded."""
    if threads <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _terminal_infected(params, terminal) -> float:
    return terminal[1]


def estimate_extinction(params, x0, cfg: SimConfig, n_paths: int,
                        i_threshold: float, threads: int = 1) -> EnsembleSummary:
    """Fraction of paths whose terminal infected frequency is below a threshold.

    Path i uses stream ``(cfg.seed, i)``; the estimate and its exact
    binomial confidence interval are invariant to execution order.

    Args:
        params: SisParams or SirsParams.
        x0: Interior initial state.
        cfg: Simulation configuration (its seed indexes the ensemble).
        n_paths: Number of independent paths, >= 1.
        i_threshold: Extinction cutoff on terminal I, in (0, 1).

    Returns:
        EnsembleSummary with extinction fraction, 95% CI, and terminal-I
        quantiles (q05, q50, q95).
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if not 0.0 < i_threshold < 1.0:
        raise ValueError(f"i_threshold must be in (0, 1), got {i_threshold}")
    state0 = _validate_x0(params, x0)

    def one(i: int) -> float:
        raw = _simulate_raw(params, state0, cfg, RngStream(cfg.seed, i), record=False)
        return _terminal_infected(params, raw.terminal)

    terminal_i = np.array(_map_ordered(one, n_paths, threads))
    k = int(np.sum(terminal_i < i_threshold))
    lo, hi = _binomial_ci(k, n_paths)
    q05, q50, q95 = np.quantile(terminal_i, [0.05, 0.5, 0.95])
    return EnsembleSummary(n_paths=n_paths, censored_count=0,
                           extinction_fraction=k / n_paths, ci_low=lo, ci_high=hi,
                           terminal_quantiles=(float(q05), float(q50), float(q95)))


def estimate_hitting_time(params, x0, epsilon: float, cfg: SimConfig,
                          n_paths: int, threads: int = 1) -> EnsembleSummary:
    """Mean first time the susceptible frequency reaches 1 - epsilon.

    A jump landing at or beyond the target counts as a hit.  Paths that
    never reach it before ``cfg.t_end`` are censored: they are excluded
    from the mean and reported in ``censored_count``, making any
    finite-horizon bias visible.

    Args:
        params: SisParams or SirsParams.
        x0: Initial state; a start already at or past the target gives
            hitting time 0 for every path.
        epsilon: Target offset in (0, 1); the target level is 1 - epsilon.
        cfg: Simulation configuration.
        n_paths: Number of independent paths.

    Returns:
        EnsembleSummary with the mean hitting time over uncensored paths
        and its standard error.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    state0 = _validate_x0(params, x0)
    target = 1.0 - epsilon
    if state0.s >= target:
        return EnsembleSummary(n_paths=n_paths, censored_count=0,
                               mean_hitting_time=0.0, hitting_time_se=0.0)

    def one(i: int):
        raw = _simulate_raw(params, state0, cfg, RngStream(cfg.seed, i),
                            record=False, stop_mode=_kernels.STOP_HIT,
                            stop_hi=target)
        return raw.stop_time

    stops = _map_ordered(one, n_paths, threads)
    hits = np.array([t for t in stops if t is not None])
    censored = n_paths - len(hits)
    if len(hits) == 0:
        return EnsembleSummary(n_paths=n_paths, censored_count=censored)
    mean = float(np.mean(hits))
    se = float(np.std(hits, ddof=1) / math.sqrt(len(hits))) if len(hits) > 1 else 0.0
    return EnsembleSummary(n_paths=n_paths, censored_count=censored,
                           mean_hitting_time=mean, hitting_time_se=se)


# ---------------------------------------------------------------------------
# Dynkin generator check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorCheck:
    """Monte Carlo generator estimate against its analytic value.

    ``z_score`` is (mc_estimate - analytic) / std_error, NaN when the
    probe is deterministic (zero standard error).
    """

    mc_estimate: float
    analytic: float
    std_error: float
    z_score: float
    n_samples: int


def _sis_test_fn(s: float) -> float:
    return 1.0 - s


def _sirs_test_fn(c: LyapunovConstants, x1: float, x2: float, x3: float) -> float:
    return c.c1 * (x1 - 1.0) ** 2 + c.c2 * x2 ** 2 + c.c3 * x3 ** 2


def _probe_values_sis(p: SisParams, s0: float, dt: float, n: int,
                      stream: RngStream) -> np.ndarray:
    """n one-step probes of (g(S(dt)) - g(s0))/dt for g(s) = 1 - s.

    Samples with jumps inside the probe window are re-simulated on the
    jump-adapted subgrid (jump times conditionally uniform), matching the
    path integrator's left-limit convention.
    """
    mass = p.jumps.total_mass
    counts = stream.poisson(mass * dt, n) if mass > 0.0 else np.zeros(n, dtype=np.int64)
    z_main = stream.standard_normal(n)
    drift0 = sis_drift(p, s0)
    diff0 = sis_diffusion(p, s0)
    s1 = s0 + drift0 * dt + diff0 * (z_main * math.sqrt(dt))
    np.clip(s1, 0.0, 1.0, out=s1)
    for idx in np.nonzero(counts)[0]:
        k = int(counts[idx])
        taus = np.sort(stream.random(k)) * dt
        zs = stream.standard_normal(k + 1)
        marks = sample_marks(p.jumps.marks, stream, k)
        hs = np.asarray(jump_values(p.jumps.jump, marks), dtype=float)
        s = s0
        t_prev = 0.0
        for j in range(k):
            gap = taus[j] - t_prev
            s = s + sis_drift(p, s) * gap + sis_diffusion(p, s) * (zs[j] * math.sqrt(gap))
            s = min(1.0, max(0.0, s))
            s = s + hs[j] * (s * (1.0 - s))
            s = min(1.0, max(0.0, s))
            t_prev = taus[j]
        gap = dt - t_prev
        s = s + sis_drift(p, s) * gap + sis_diffusion(p, s) * (zs[k] * math.sqrt(gap))
        s1[idx] = min(1.0, max(0.0, s))
    g0 = _sis_test_fn(s0)
    return ((1.0 - s1) - g0) / dt


def _probe_values_sirs(p: SirsParams, x0, c: LyapunovConstants, dt: float,
                       n: int, stream: RngStream) -> np.ndarray:
    """n one-step probes of (f(X(dt)) - f(x0))/dt for the quadratic f."""
    s0, i0, r0 = x0
    mass = p.jumps.total_mass
    counts = stream.poisson(mass * dt, n) if mass > 0.0 else np.zeros(n, dtype=np.int64)
    z_main = stream.standard_normal(n)
    bsi = p.beta * (s0 * i0)
    d_s = -bsi + p.delta * r0
    d_i = bsi - p.lam * i0
    d_r = -(d_s + d_i)
    g = (p.sigma * (s0 * i0)) * (z_main * math.sqrt(dt))
    s1 = np.clip(s0 + d_s * dt - g, 0.0, 1.0)
    i1 = np.clip(i0 + d_i * dt + g, 0.0, 1.0)
    r1 = np.full(n, min(1.0, max(0.0, r0 + d_r * dt)))
    for idx in np.nonzero(counts)[0]:
        k = int(counts[idx])
        taus = np.sort(stream.random(k)) * dt
        zs = stream.standard_normal(k + 1)
        marks = sample_marks(p.jumps.marks, stream, k)
        js = np.asarray(jump_values(p.jumps.jump, marks), dtype=float)
        s, i, r = s0, i0, r0
        t_prev = 0.0
        for j in range(k + 1):
            gap = (taus[j] if j < k else dt) - t_prev
            bsi = p.beta * (s * i)
            a_s = -bsi + p.delta * r
            a_i = bsi - p.lam * i
            a_r = -(a_s + a_i)
            gg = (p.sigma * (s * i)) * (zs[j] * math.sqrt(gap))
            s = min(1.0, max(0.0, s + a_s * gap - gg))
            i = min(1.0, max(0.0, i + a_i * gap + gg))
            r = min(1.0, max(0.0, r + a_r * gap))
            if j < k:
                jmp = js[j] * i
                i = min(1.0, max(0.0, i - jmp))
                r = min(1.0, max(0.0, r + jmp))
                t_prev = taus[j]
        s1[idx], i1[idx], r1[idx] = s, i, r
    f0 = _sirs_test_fn(c, s0, i0, r0)
    return (_sirs_test_fn(c, s1, i1, r1) - f0) / dt


def dynkin_generator_check(params, x, dt_probe: float = 1e-3,
                           n_samples: int = 100_000,
                           stream: RngStream | None = None,
                           constants: LyapunovConstants | None = None) -> GeneratorCheck:
    """Compare the analytic generator with a one-probe Monte Carlo estimate.

    The estimator is the mean of (g(X(dt_probe)) - g(x))/dt_probe over
    ``n_samples`` independent one-step simulations from x, with g the
    model's Lyapunov test function (g = 1 - S for SIS; the quadratic f,
    requiring ``constants``, for SIRS).

    Args:
        params: SisParams or SirsParams.
        x: Probe state, interior unless the dynamics are deterministic.
        dt_probe: Probe horizon (small; the estimator has O(dt) bias).
        n_samples: Number of probes.
        stream: Variate source, defaults to RngStream(0, 0).
        constants: Lyapunov weights, required for SIRS.

    Returns:
        GeneratorCheck with the Monte Carlo mean, analytic value,
        standard error, and z-score.
    """
    if not dt_probe > 0.0:
        raise ValueError("dt_probe must be > 0")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    state0 = _validate_x0(params, x)
    if stream is None:
        stream = RngStream(0, 0)
    if isinstance(params, SisParams):
        values = _probe_values_sis(params, state0.s, dt_probe, n_samples, stream)
        analytic = sis_generator_g(params, state0.s)
    else:
        if constants is None:
            raise ValueError("SIRS generator check requires Lyapunov constants")
        values = _probe_values_sirs(params, state0.coords, constants, dt_probe,
                                    n_samples, stream)
        analytic = sirs_generator_f(params, constants, state0)
    mc = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    if se > 0.0:
        z = (mc - analytic) / se
    else:
        z = 0.0 if mc == analytic else math.nan
    return GeneratorCheck(mc_estimate=mc, analytic=analytic, std_error=se,
                          z_score=z, n_samples=n_samples)


# ---------------------------------------------------------------------------
# Exit probability: PIDE solve and Monte Carlo oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExitProblem:
    """Two-sided exit problem for the SIS reduction on (x1, x2).

    The grid spans [0, 1]; [0, x1] and [x2, 1] are absorbing layers
    where the exit function is 0 and 1 respectively.
    """

    params: SisParams
    x1: float
    x2: float
    x0: float
    grid_n: int = 2001

    def __post_init__(self):
        if not 0.0 < self.x1 < self.x2 < 1.0:
            raise ValueError(f"need 0 < x1 < x2 < 1, got x1={self.x1}, x2={self.x2}")
        if not 0.0 <= self.x0 <= 1.0:
            raise ValueError(f"x0 must lie in [0, 1], got {self.x0}")
        if self.grid_n < 100:
            raise ValueError(f"grid_n must be >= 100, got {self.grid_n}")


@dataclass(frozen=True)
class ExitSolution:
    """Upper-exit probability profile u on the full [0, 1] grid."""

    xs: np.ndarray
    u: np.ndarray
    pi_up: float


@dataclass(frozen=True)
class McExitResult:
    """Monte Carlo first-exit estimate (censored paths excluded, counted)."""

    pi_up: float
    n_paths: int
    censored_count: int
    std_error: float


def solve_exit_probability(prob: ExitProblem) -> ExitSolution:
    """Solve the exit-probability integro-differential equation.

    Central finite differences discretize the drift and diffusion terms
    on a uniform grid over [0, 1]; the jump term evaluates the displaced
    argument x + h(y) x(1-x) per mark node (exact for point-mass and
    discrete marks, 32-node Gauss-Legendre for uniform marks) with linear
    interpolation of u between grid points.  Displacements landing in an
    absorbing layer contribute the known value 0 or 1.  The assembled
    sparse linear system is solved directly.

    Returns:
        ExitSolution with the grid, the profile u, and its interpolated
        value at ``prob.x0``.

    Raises:
        NumericalFailureError: When the system is singular or the solve
            produces non-finite values (for example sigma = 0 with no
            jumps and a degenerate drift).
    """
    p = prob.params
    n = prob.grid_n
    xs = np.linspace(0.0, 1.0, n)
    h = xs[1] - xs[0]
    u_known = np.where(xs >= prob.x2, 1.0, 0.0)
    interior = np.nonzero((xs > prob.x1) & (xs < prob.x2))[0]
    if len(interior) == 0:
        return ExitSolution(xs=xs, u=u_known, pi_up=float(np.interp(prob.x0, xs, u_known)))
    col_of = np.full(n, -1, dtype=np.int64)
    col_of[interior] = np.arange(len(interior))

    mass = p.jumps.total_mass
    if mass > 0.0:
        nodes, weights = mark_nodes(p.jumps.marks, UNIFORM_QUAD_NODES)
        h_nodes = np.asarray(jump_values(p.jumps.jump, nodes), dtype=float)
    else:
        h_nodes = np.empty(0)
        weights = np.empty(0)

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    b = np.zeros(len(interior))

    def add(row: int, grid_idx: int, coeff: float) -> None:
        c = col_of[grid_idx]
        if c >= 0:
            rows.append(row)
            cols.append(c)
            vals.append(coeff)
        else:
            b[row] -= coeff * u_known[grid_idx]

    for row, gi in enumerate(interior):
        x = xs[gi]
        alpha = sis_drift(p, x)
        gamma = sis_diffusion(p, x)
        diff2 = 0.5 * gamma * gamma / (h * h)
        adv = alpha / (2.0 * h)
        add(row, gi - 1, diff2 - adv)
        add(row, gi, -2.0 * diff2)
        add(row, gi + 1, diff2 + adv)
        if mass > 0.0:
            add(row, gi, -mass)
            disp = x + h_nodes * (x * (1.0 - x))
            pos = disp / h
            base = np.clip(np.floor(pos).astype(np.int64), 0, n - 2)
            frac = pos - base
            for k in range(len(h_nodes)):
                w = mass * weights[k]
                add(row, int(base[k]), w * (1.0 - frac[k]))
                add(row, int(base[k]) + 1, w * frac[k])

    matrix = scipy.sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(interior), len(interior)))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.sparse.linalg.MatrixRankWarning)
            u_int = scipy.sparse.linalg.spsolve(matrix, b)
    except Exception as exc:  # singular factorization
        raise NumericalFailureError(
            f"exit-probability system could not be solved: {exc}") from exc
    if not np.all(np.isfinite(u_int)):
        cond = _condition_estimate(matrix)
        raise NumericalFailureError(
            f"exit-probability solve produced non-finite values "
            f"(condition estimate {cond:.3e})", condition_estimate=cond)
    u = u_known.copy()
    u[interior] = u_int
    return ExitSolution(xs=xs, u=u, pi_up=float(np.interp(prob.x0, xs, u)))


def _condition_estimate(matrix) -> float:
    if matrix.shape[0] <= 4000:
        try:
            return float(np.linalg.cond(matrix.toarray()))
        except Exception:
            return math.inf
    return math.inf


def mc_exit_probability(prob: ExitProblem, x0: float | None, cfg: SimConfig,
                        n_paths: int, threads: int = 1) -> McExitResult:
    """Monte Carlo oracle for the exit problem.

    Simulates SIS paths from x0 until the first time S leaves the open
    interval (x1, x2); a landing at or above x2 (jump overshoot included)
    counts as an upper exit.  Paths still inside at ``cfg.t_end`` are
    censored: excluded from the estimate and counted.

    Args:
        prob: Exit problem; supplies the interval and parameters.
        x0: Start point, strictly inside (x1, x2); defaults to prob.x0.
        cfg: Simulation configuration (its t_end is the safety horizon).
        n_paths: Number of paths.

    Returns:
        McExitResult with the upper-exit fraction among exited paths, the
        censored count, and the binomial standard error.
    """
    if x0 is None:
        x0 = prob.x0
    if not prob.x1 < x0 < prob.x2:
        raise ValueError(f"x0 must lie strictly inside ({prob.x1}, {prob.x2}), got {x0}")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    p = prob.params
    state0 = SimplexState.sis(x0)

    def one(i: int):
        raw = _simulate_raw(p, state0, cfg, RngStream(cfg.seed, i), record=False,
                            stop_mode=_kernels.STOP_EXIT,
                            stop_lo=prob.x1, stop_hi=prob.x2)
        if raw.stop_time is None:
            return None
        return raw.stop_state[0] >= prob.x2

    outcomes = _map_ordered(one, n_paths, threads)
    exited = [o for o in outcomes if o is not None]
    censored = n_paths - len(exited)
    if not exited:
        return McExitResult(pi_up=math.nan, n_paths=n_paths,
                            censored_count=censored, std_error=math.nan)
    pi = sum(exited) / len(exited)
    se = math.sqrt(pi * (1.0 - pi) / len(exited))
    return McExitResult(pi_up=pi, n_paths=n_paths, censored_count=censored,
                        std_error=se)
