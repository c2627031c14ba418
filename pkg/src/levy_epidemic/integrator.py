"""Jump-adapted Euler-Maruyama integration of the SIS/SIRS systems.

The diffusion grid of spacing ``dt`` is merged with the exactly sampled
jump times; diffusion is integrated to each jump time and the jump
amplitude is applied to the left-limit state, so jump placement carries
no discretization bias.  Boundary excursions produced by discretization
noise are absorbed by the configured boundary policy and counted rather
than hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .jumps import sample_jump_events, jump_values
from .models import (SimplexState, SisParams, SirsParams, is_deterministic,
                     sis_drift, sis_diffusion, sis_jump_amplitude,
                     sirs_coefficients)
from .rng import RngStream

BOUNDARY_POLICIES = ("clamp", "reject_step")
_POLICY_CODE = {"clamp": _kernels.POLICY_CLAMP, "reject_step": _kernels.POLICY_REJECT}


@dataclass(frozen=True)
class SimConfig:
    """Time-stepping configuration.

    Attributes:
        t_end: Simulation horizon, > 0.
        dt: Maximum diffusion step; the actual grid uses t_end/n <= dt.
        seed: Master seed; path ensembles use stream indices 0..n_paths-1.
        boundary_policy: "clamp" projects an offending state back onto
            the simplex; "reject_step" keeps the pre-step state.  Either
            way the intervention is counted in ``Trajectory.clamp_count``.
        record_stride: Record every this-many diffusion grid points
            (jumps and the endpoints are always recorded).
    """

    t_end: float
    dt: float = 1e-3
    seed: int = 0
    boundary_policy: str = "clamp"
    record_stride: int = 1

    def __post_init__(self):
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if not 0.0 < self.dt <= self.t_end:
            raise ValueError(f"dt must be in (0, t_end], got {self.dt}")
        if self.boundary_policy not in BOUNDARY_POLICIES:
            raise ValueError(f"boundary_policy must be one of {BOUNDARY_POLICIES}")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ValueError(f"record_stride must be an integer >= 1, got {self.record_stride}")


@dataclass
class Trajectory:
    """Recorded path: times, simplex states, and jump bookkeeping.

    ``jump_marks`` holds one (time, mark, pre_jump_state) triple per jump
    event, where the pre-state is the left limit the amplitude was
    applied to.  ``sum_error_max`` is the largest |sum(coords) - 1|
    observed before boundary enforcement, a direct measurement of
    discrete simplex conservation.
    """

    model: str
    times: np.ndarray
    states: np.ndarray
    jumped: np.ndarray
    jump_marks: list[tuple[float, float, tuple[float, ...]]]
    clamp_count: int
    sum_error_max: float

    @property
    def terminal_state(self) -> SimplexState:
        return SimplexState(tuple(self.states[-1]))

    def __len__(self) -> int:
        return len(self.times)


# ---------------------------------------------------------------------------
# Reference stepper (pure Python; kernels must match it bitwise)
# ---------------------------------------------------------------------------


def _apply_policy_sis(s_new: float, s_prev: float, policy: str) -> tuple[float, int]:
    if 0.0 <= s_new <= 1.0:
        return s_new, 0
    if policy == "clamp":
        return min(1.0, max(0.0, s_new)), 1
    return s_prev, 1


def step(params, state: SimplexState, dt: float, dw: float,
         jump_marks=()) -> SimplexState:
    """One Euler substep followed by any jumps firing at its end.

    Applies drift*dt + diffusion*dw, enforces the boundary policy
    ("clamp" semantics), then applies each jump amplitude to the
    left-limit state in order.  This is the reference implementation the
    compiled kernels are checked against.

    Args:
        params: SisParams or SirsParams.
        state: Current state on the matching simplex.
        dt: Substep length, > 0.
        dw: Brownian increment for the substep.
        jump_marks: Marks of jumps firing exactly at the substep end.

    Returns:
        The post-step SimplexState.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if isinstance(params, SisParams):
        s = state.s
        s_new = s + sis_drift(params, s) * dt + sis_diffusion(params, s) * dw
        s_new, _ = _apply_policy_sis(s_new, s, "clamp")
        s = s_new
        for mark in jump_marks:
            s_new = s + sis_jump_amplitude(params, s, mark)
            s_new, _ = _apply_policy_sis(s_new, s, "clamp")
            s = s_new
        return SimplexState.sis(s)
    if isinstance(params, SirsParams):
        s, i, r = state.coords
        drift, _, _ = sirs_coefficients(params, (s, i, r))
        g = (params.sigma * (s * i)) * dw
        s_new = s + drift[0] * dt - g
        i_new = i + drift[1] * dt + g
        r_new = r + drift[2] * dt
        coords = np.clip([s_new, i_new, r_new], 0.0, 1.0)
        if not np.array_equal(coords, [s_new, i_new, r_new]):
            coords = coords / coords.sum()
        s, i, r = coords
        for mark in jump_marks:
            jmp = jump_values(params.jumps.jump, mark) * i
            i_new = i - jmp
            r_new = r + jmp
            if not (0.0 <= i_new <= 1.0 and 0.0 <= r_new <= 1.0):
                i_new = min(1.0, max(0.0, i_new))
                r_new = min(1.0, max(0.0, r_new))
            i, r = i_new, r_new
        return SimplexState.sirs(s, i, r)
    raise TypeError(f"expected SisParams or SirsParams, got {type(params).__name__}")


# ---------------------------------------------------------------------------
# Substep construction and kernel driver
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _grid_ends(t_end: float, dt: float) -> np.ndarray:
    """Substep-end times of the uniform diffusion grid (t=0 excluded)."""
    n = max(1, math.ceil(t_end / dt - 1e-9))
    ends = np.linspace(0.0, t_end, n + 1)[1:]
    ends.setflags(write=False)
    return ends


def _build_substeps(t_end: float, dt: float, stride: int, jump_times: np.ndarray,
                    record: bool):
    """Merge the uniform diffusion grid with exact jump times.

    Returns (ends, dts, jump_at, rec) where ends[k] is the end time of
    substep k, jump_at[k] the jump-event index firing there (or -1), and
    rec[k] flags substep ends to record.  Grid points that collide
    exactly with a jump time are dropped in favor of the jump.
    """
    ends = _grid_ends(t_end, dt)
    n = len(ends)
    nj = len(jump_times)
    if nj:
        # Exact-collision scan against the (small) sorted jump-time array;
        # avoids sorting the full grid the way np.isin would.
        near = np.searchsorted(ends, jump_times)
        valid = near < n
        collide = near[valid][ends[near[valid]] == jump_times[valid]]
        if len(collide):
            keep = np.ones(n, dtype=bool)
            keep[collide] = False
            ends_kept = ends[keep]
            idx_kept = np.arange(1, n + 1)[keep]
        else:
            ends_kept = ends
            idx_kept = None
        ins = np.searchsorted(ends_kept, jump_times)
        merged = np.insert(ends_kept, ins, jump_times)
        jump_pos = ins + np.arange(nj)
    else:
        ends_kept = ends
        idx_kept = None
        merged = ends
        jump_pos = np.empty(0, dtype=np.int64)
    m = len(merged)
    jump_at = np.full(m, -1, dtype=np.int64)
    jump_at[jump_pos] = np.arange(nj)
    rec = np.zeros(m, dtype=np.uint8)
    if record:
        rec[jump_pos] = 1
        if idx_kept is None:
            idx_kept = np.arange(1, len(ends_kept) + 1)
        grid_pos = np.delete(np.arange(m), jump_pos)
        stride_mask = (idx_kept % stride == 0) | (idx_kept == n)
        rec[grid_pos[stride_mask]] = 1
    dts = np.empty(m)
    dts[0] = merged[0]
    np.subtract(merged[1:], merged[:-1], out=dts[1:])
    return merged, dts, jump_at, rec


@dataclass
class _RawPath:
    """Internal result of one kernel run."""

    terminal: tuple[float, ...]
    clamp_count: int
    sum_error_max: float
    stop_time: float | None
    stop_state: tuple[float, ...] | None
    n_substeps: int = 0
    rec_times: np.ndarray | None = None
    rec_states: np.ndarray | None = None
    rec_jumped: np.ndarray | None = None
    jump_records: list = field(default_factory=list)


def _validate_x0(params, x0) -> SimplexState:
    state = x0 if isinstance(x0, SimplexState) else SimplexState(tuple(float(v) for v in x0))
    want = 2 if isinstance(params, SisParams) else 3
    if state.dim != want:
        raise ValueError(f"x0 has {state.dim} coordinates, model needs {want}")
    if not is_deterministic(params) and not state.is_interior():
        raise ValueError("stochastic runs require x0 strictly inside the simplex")
    return state


def _simulate_raw(params, x0: SimplexState, cfg: SimConfig, stream: RngStream,
                  record: bool, stop_mode: int = _kernels.STOP_NONE,
                  stop_lo: float = 0.0, stop_hi: float = 1.0) -> _RawPath:
    """Run one path through the compiled kernel.

    Stream consumption order is fixed: jump inter-arrivals, then marks,
    then one Brownian increment per substep, so results are reproducible
    from (params, x0, cfg, stream) alone.
    """
    events = sample_jump_events(stream, params.jumps, 0.0, cfg.t_end) \
        if params.jumps.total_mass > 0.0 else None
    jump_times = events.times if events is not None else np.empty(0)
    ends, dts, jump_at, rec = _build_substeps(
        cfg.t_end, cfg.dt, cfg.record_stride, jump_times, record)
    dws = stream.standard_normal(len(dts))
    dws *= np.sqrt(dts)
    policy = _POLICY_CODE[cfg.boundary_policy]
    nj = len(jump_times)
    h_vals = np.asarray(jump_values(params.jumps.jump, events.marks), dtype=float) \
        if nj else np.empty(0)
    n_rec_max = int(rec.sum())

    if isinstance(params, SisParams):
        out_s = np.empty(n_rec_max)
        out_pre = np.empty(nj)
        n_rec, n_pre, clamps, max_err, stop_k, s_term = _kernels.sis_path_kernel(
            x0.s, dts, dws, jump_at, h_vals, policy, rec, out_s, out_pre,
            params.beta, params.mu, params.lam, params.sigma,
            stop_mode, stop_lo, stop_hi)
        terminal = (s_term, 1.0 - s_term)
        states_of = lambda arr: np.column_stack((arr, 1.0 - arr))
        pre_states = [(float(v), float(1.0 - v)) for v in out_pre[:n_pre]]
    else:
        out_states = np.empty((n_rec_max, 3))
        out_pre = np.empty((nj, 3))
        s0, i0, r0 = x0.coords
        n_rec, n_pre, clamps, max_err, stop_k, s_t, i_t, r_t = _kernels.sirs_path_kernel(
            s0, i0, r0, dts, dws, jump_at, h_vals, policy, rec, out_states, out_pre,
            params.beta, params.lam, params.delta, params.sigma,
            stop_mode, stop_lo, stop_hi)
        terminal = (s_t, i_t, r_t)
        states_of = lambda arr: arr
        pre_states = [tuple(map(float, row)) for row in out_pre[:n_pre]]

    stop_time = None
    stop_state = None
    if stop_k >= 0:
        stop_time = float(ends[stop_k])
        stop_state = terminal

    result = _RawPath(terminal=terminal, clamp_count=int(clamps),
                      sum_error_max=float(max_err), stop_time=stop_time,
                      stop_state=stop_state, n_substeps=len(dts))
    if record:
        end_rec_mask = rec.astype(bool)
        rec_times = ends[end_rec_mask][:n_rec]
        rec_jumped = (jump_at >= 0)[end_rec_mask][:n_rec]
        if isinstance(params, SisParams):
            rec_states = states_of(out_s[:n_rec])
        else:
            rec_states = states_of(out_states[:n_rec])
        result.rec_times = np.concatenate(([0.0], rec_times))
        result.rec_states = np.vstack((np.array([x0.coords]), rec_states))
        result.rec_jumped = np.concatenate(([False], rec_jumped))
        marks = events.marks if events is not None else np.empty(0)
        result.jump_records = [
            (float(t), float(mk), pre)
            for t, mk, pre in zip(jump_times[:n_pre], marks[:n_pre], pre_states)
        ]
    return result


def simulate_path(params, x0, cfg: SimConfig, stream: RngStream | None = None) -> Trajectory:
    """Simulate one trajectory on the jump-adapted grid.

    States are recorded at t = 0, every ``cfg.record_stride``-th diffusion
    grid point, the horizon, and every jump instant.  Identical
    (params, x0, cfg, stream) inputs reproduce the trajectory bit for bit.

    Args:
        params: SisParams or SirsParams.
        x0: Initial state; must be strictly interior unless the run is
            deterministic (sigma = 0 and no jumps).
        cfg: Time-stepping configuration.
        stream: Variate source; defaults to ``RngStream(cfg.seed, 0)``.

    Returns:
        The recorded Trajectory.

    Raises:
        ValueError: For an off-simplex x0, a dimension mismatch, or a
            boundary x0 in a stochastic run.
    """
    state0 = _validate_x0(params, x0)
    if stream is None:
        stream = RngStream(cfg.seed, 0)
    raw = _simulate_raw(params, state0, cfg, stream, record=True)
    model = "sis" if isinstance(params, SisParams) else "sirs"
    return Trajectory(model=model, times=raw.rec_times, states=raw.rec_states,
                      jumped=raw.rec_jumped, jump_marks=raw.jump_records,
                      clamp_count=raw.clamp_count, sum_error_max=raw.sum_error_max)
