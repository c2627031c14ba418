"""Compiled inner loops for jump-adapted Euler-Maruyama stepping.

Coefficient expressions mirror ``models`` term for term; tests assert
bitwise agreement between these kernels and the pure-Python reference
stepper.  Substep k covers (t_k, t_{k+1}]; a nonnegative ``jump_at[k]``
means jump event ``jump_at[k]`` fires exactly at the substep end and is
applied to the post-diffusion (left-limit) state.

Stop modes: 0 none, 1 first time s >= stop_hi (hitting), 2 first exit
from the open interval (stop_lo, stop_hi).  The stop condition is checked
after each substep and again after each jump, so jump overshoot counts.
"""

import numpy as np
from numba import njit

POLICY_CLAMP = 0
POLICY_REJECT = 1

STOP_NONE = 0
STOP_HIT = 1
STOP_EXIT = 2


@njit(cache=True, nogil=True)
def sis_path_kernel(s0, dts, dws, jump_at, jump_h, policy, record,
                    out_s, out_pre, beta, mu, lam, sigma,
                    stop_mode, stop_lo, stop_hi):
    """Evolve the 1-D SIS reduction over prebuilt substeps.

    Returns (n_recorded, n_jumps_applied, clamp_count, max_sum_err,
    stop_substep or -1, terminal_s).
    """
    s = s0
    n_rec = 0
    n_pre = 0
    clamps = 0
    max_err = 0.0
    for k in range(dts.shape[0]):
        si = s * (1.0 - s)
        drift = -beta * si - mu * s + mu + lam * (1.0 - s)
        s_new = s + drift * dts[k] + (-sigma * si) * dws[k]
        err = abs((s_new + (1.0 - s_new)) - 1.0)
        if err > max_err:
            max_err = err
        if s_new < 0.0 or s_new > 1.0:
            clamps += 1
            if policy == POLICY_CLAMP:
                s_new = min(1.0, max(0.0, s_new))
            else:
                s_new = s
        s = s_new
        j = jump_at[k]
        if j >= 0:
            out_pre[n_pre] = s
            n_pre += 1
            s_new = s + jump_h[j] * (s * (1.0 - s))
            if s_new < 0.0 or s_new > 1.0:
                clamps += 1
                if policy == POLICY_CLAMP:
                    s_new = min(1.0, max(0.0, s_new))
                else:
                    s_new = s
            s = s_new
        if record[k]:
            out_s[n_rec] = s
            n_rec += 1
        if stop_mode == STOP_HIT and s >= stop_hi:
            return n_rec, n_pre, clamps, max_err, k, s
        if stop_mode == STOP_EXIT and (s <= stop_lo or s >= stop_hi):
            return n_rec, n_pre, clamps, max_err, k, s
    return n_rec, n_pre, clamps, max_err, -1, s


@njit(cache=True, nogil=True)
def sirs_path_kernel(s0, i0, r0, dts, dws, jump_at, jump_h, policy, record,
                     out_states, out_pre, beta, lam, delta, sigma,
                     stop_mode, stop_lo, stop_hi):
    """Evolve the 3-compartment SIRS system over prebuilt substeps.

    The drift R-component is the exact negative of the other two so the
    simplex sum is conserved up to per-step addition roundoff, which is
    what ``max_sum_err`` measures (before any clamping).

    Returns (n_recorded, n_jumps_applied, clamp_count, max_sum_err,
    stop_substep or -1, s, i, r).
    """
    s = s0
    i = i0
    r = r0
    n_rec = 0
    n_pre = 0
    clamps = 0
    max_err = 0.0
    for k in range(dts.shape[0]):
        dt = dts[k]
        bsi = beta * (s * i)
        d_s = -bsi + delta * r
        d_i = bsi - lam * i
        d_r = -(d_s + d_i)
        g = (sigma * (s * i)) * dws[k]
        s_new = s + d_s * dt - g
        i_new = i + d_i * dt + g
        r_new = r + d_r * dt
        err = abs(((s_new + i_new) + r_new) - 1.0)
        if err > max_err:
            max_err = err
        bad = (s_new < 0.0 or s_new > 1.0 or i_new < 0.0 or i_new > 1.0
               or r_new < 0.0 or r_new > 1.0)
        if bad:
            clamps += 1
            if policy == POLICY_CLAMP:
                s_new = min(1.0, max(0.0, s_new))
                i_new = min(1.0, max(0.0, i_new))
                r_new = min(1.0, max(0.0, r_new))
                total = s_new + i_new + r_new
                s_new /= total
                i_new /= total
                r_new /= total
            else:
                s_new = s
                i_new = i
                r_new = r
        s = s_new
        i = i_new
        r = r_new
        j = jump_at[k]
        if j >= 0:
            out_pre[n_pre, 0] = s
            out_pre[n_pre, 1] = i
            out_pre[n_pre, 2] = r
            n_pre += 1
            jmp = jump_h[j] * i
            i_new = i - jmp
            r_new = r + jmp
            if i_new < 0.0 or i_new > 1.0 or r_new < 0.0 or r_new > 1.0:
                clamps += 1
                if policy == POLICY_CLAMP:
                    i_new = min(1.0, max(0.0, i_new))
                    r_new = min(1.0, max(0.0, r_new))
                else:
                    i_new = i
                    r_new = r
            i = i_new
            r = r_new
        if record[k]:
            out_states[n_rec, 0] = s
            out_states[n_rec, 1] = i
            out_states[n_rec, 2] = r
            n_rec += 1
        if stop_mode == STOP_HIT and s >= stop_hi:
            return n_rec, n_pre, clamps, max_err, k, s, i, r
        if stop_mode == STOP_EXIT and (s <= stop_lo or s >= stop_hi):
            return n_rec, n_pre, clamps, max_err, k, s, i, r
    return n_rec, n_pre, clamps, max_err, -1, s, i, r
