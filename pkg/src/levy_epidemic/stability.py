"""Closed-form stability conditions and analytic infinitesimal generators.

Disease-free-equilibrium conditions for the stochastic systems:

  * SIS, signed jumps with negative mean: the DFE is almost-surely
    attracting when beta < mu + lambda + int_h, where int_h is the jump
    function integrated against the intensity measure (int_h < 0 is a
    hypothesis).
  * SIS, nonnegative jumps: attracting when some phi in (0, 1) satisfies
    beta < mu + lambda + phi * int_h, which is equivalent to
    beta < mu + lambda + int_h with the supremum never attained.
  * SIRS: attracting when beta < min(lambda + int_j - int_j_sq/2
    - sigma^2/2, delta).

The generators evaluated here are those of the Lyapunov functions used
to prove the conditions: g(s) = 1 - s for SIS and the weighted quadratic
f(x) = c1 (x1-1)^2 + c2 x2^2 + c3 x3^2 for SIRS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConditionNotApplicableError, InfeasibleConstantsError
from .jumps import compute_jump_integrals
from .models import SimplexState, SisParams, SirsParams

PHI_GRID_STEP = 1e-6
CONSTANT_SLACK = 1.01
DETAIL_SUM_TOL = 1e-12


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of a closed-form stability condition.

    ``detail`` lists the additive terms of ``threshold_value`` (they sum
    to it within 1e-12); ``info`` carries non-additive diagnostics such
    as the SIRS branch values or the corollary's witness phi.

    Invariant: ``condition_holds`` iff ``margin > 0`` with
    ``margin = threshold_value - beta``.
    """

    condition_holds: bool
    threshold_value: float
    margin: float
    beta: float
    detail: dict[str, float]
    info: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        assert self.condition_holds == (self.margin > 0.0)
        assert abs(math.fsum(self.detail.values()) - self.threshold_value) <= DETAIL_SUM_TOL


@dataclass(frozen=True)
class LyapunovConstants:
    """Weights (c1, c2, c3) of the quadratic Lyapunov function plus kappa."""

    c1: float
    c2: float
    c3: float
    kappa: float

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3, self.kappa) <= 0.0:
            raise ValueError("all Lyapunov constants must be positive")


# ---------------------------------------------------------------------------
# Condition evaluators
# ---------------------------------------------------------------------------


def sis_dfe_condition(p: SisParams) -> StabilityVerdict:
    """SIS condition for negative-mean jumps: beta < mu + lambda + int_h.

    Raises:
        ConditionNotApplicableError: When int_h >= 0; the nonnegative-jump
            case is covered by :func:`sis_dfe_condition_positive`.
    """
    int_h = compute_jump_integrals(p.jumps).int_h
    if int_h >= 0.0:
        raise ConditionNotApplicableError(
            f"int_h = {int_h} is not negative; use sis_dfe_condition_positive")
    threshold = p.mu + p.lam + int_h
    margin = threshold - p.beta
    return StabilityVerdict(
        condition_holds=margin > 0.0,
        threshold_value=threshold,
        margin=margin,
        beta=p.beta,
        detail={"mu": p.mu, "lam": p.lam, "int_h": int_h},
    )


def sis_dfe_condition_positive(p: SisParams) -> StabilityVerdict:
    """SIS condition for nonnegative jumps, with a witness phi.

    Holds when some phi in (0, 1) gives beta < mu + lambda + phi*int_h.
    Because int_h >= 0 the supremum over phi is mu + lambda + int_h
    (never attained), so that supremum is reported as the threshold.  The
    returned ``info["phi"]`` is the smallest multiple of 1e-6 satisfying
    the strict inequality (the grid minimum 1e-6 when already
    beta < mu + lambda), or NaN when no witness below 1 exists.

    Raises:
        ConditionNotApplicableError: When the jump function takes
            negative values on the mark support.
    """
    if not p.jumps.is_nonnegative:
        raise ConditionNotApplicableError(
            f"jump function range [{p.jumps.jump_min}, {p.jumps.jump_max}] "
            "takes negative values; use sis_dfe_condition")
    int_h = compute_jump_integrals(p.jumps).int_h
    base = p.mu + p.lam
    phi = math.nan
    if p.beta < base:
        phi = PHI_GRID_STEP
    elif int_h > 0.0:
        k = math.floor((p.beta - base) / int_h / PHI_GRID_STEP) + 1
        while k * PHI_GRID_STEP < 1.0 and not p.beta < base + k * PHI_GRID_STEP * int_h:
            k += 1
        if k * PHI_GRID_STEP < 1.0:
            phi = k * PHI_GRID_STEP
    threshold = base + int_h
    margin = threshold - p.beta
    return StabilityVerdict(
        condition_holds=margin > 0.0,
        threshold_value=threshold,
        margin=margin,
        beta=p.beta,
        detail={"mu": p.mu, "lam": p.lam, "int_h": int_h},
        info={"phi": phi},
    )


def sirs_dfe_condition(p: SirsParams) -> StabilityVerdict:
    """SIRS condition: beta < min(lambda + int_j - int_j_sq/2 - sigma^2/2, delta).

    ``info`` exposes both branch values; ``detail`` breaks down whichever
    branch is binding.
    """
    ints = compute_jump_integrals(p.jumps)
    half_sq = 0.5 * ints.int_h_sq
    half_sigma = 0.5 * p.sigma * p.sigma
    branch_jump = p.lam + ints.int_h - half_sq - half_sigma
    threshold = min(branch_jump, p.delta)
    if threshold == p.delta:
        detail = {"delta": p.delta}
    else:
        detail = {"lam": p.lam, "int_j": ints.int_h,
                  "neg_half_int_j_sq": -half_sq, "neg_half_sigma_sq": -half_sigma}
    margin = threshold - p.beta
    return StabilityVerdict(
        condition_holds=margin > 0.0,
        threshold_value=threshold,
        margin=margin,
        beta=p.beta,
        detail=detail,
        info={"branch_jump": branch_jump, "branch_delta": p.delta},
    )


def sis_deterministic_threshold(p: SisParams) -> float:
    """Deterministic SIS threshold mu + lambda (DFE stable iff beta <= it)."""
    return p.mu + p.lam


# ---------------------------------------------------------------------------
# Lyapunov constants for the SIRS proof
# ---------------------------------------------------------------------------


def find_lyapunov_constants(p: SirsParams) -> LyapunovConstants:
    """Concrete constants satisfying the SIRS Lyapunov inequalities.

    Construction: kappa = (delta - beta)/4, c3 = 1, then c1 and c2 at
    1.01 times their respective lower bounds

        c1 > c3 (lambda + int_j) / (delta - beta - 2 kappa),
        c2 > (c1 (sigma^2/2 + beta) + c3 int_j_sq)
             / (lambda + int_j - int_j_sq/2 - sigma^2/2 - beta).

    Raises:
        InfeasibleConstantsError: When the stability condition fails, in
            which case a bound denominator is nonpositive.
    """
    verdict = sirs_dfe_condition(p)
    if not verdict.condition_holds:
        raise InfeasibleConstantsError(
            f"condition fails (beta={p.beta} >= threshold={verdict.threshold_value}); "
            "no feasible constants exist")
    ints = compute_jump_integrals(p.jumps)
    kappa = 0.25 * (p.delta - p.beta)
    c3 = 1.0
    gap = p.delta - p.beta - 2.0 * kappa
    c1 = CONSTANT_SLACK * c3 * (p.lam + ints.int_h) / gap
    denom = verdict.info["branch_jump"] - p.beta
    c2 = CONSTANT_SLACK * (c1 * (0.5 * p.sigma * p.sigma + p.beta) + c3 * ints.int_h_sq) / denom
    constants = LyapunovConstants(c1=c1, c2=c2, c3=c3, kappa=kappa)
    check_lyapunov_constants(p, constants)
    return constants


def check_lyapunov_constants(p: SirsParams, c: LyapunovConstants) -> None:
    """Assert the three Lyapunov-constant inequalities for parameters p.

    Raises:
        InfeasibleConstantsError: If any inequality fails.
    """
    ints = compute_jump_integrals(p.jumps)
    gap = p.delta - p.beta - 2.0 * c.kappa
    if not gap > 0.0:
        raise InfeasibleConstantsError(f"delta - beta - 2*kappa = {gap} is not positive")
    if not c.c1 > c.c3 * (p.lam + ints.int_h) / gap:
        raise InfeasibleConstantsError("c1 below its lower bound")
    denom = (p.lam + ints.int_h - 0.5 * ints.int_h_sq
             - 0.5 * p.sigma * p.sigma - p.beta)
    if not denom > 0.0:
        raise InfeasibleConstantsError(f"c2 bound denominator {denom} is not positive")
    if not c.c2 > (c.c1 * (0.5 * p.sigma * p.sigma + p.beta) + c.c3 * ints.int_h_sq) / denom:
        raise InfeasibleConstantsError("c2 below its lower bound")


# ---------------------------------------------------------------------------
# Analytic generators
# ---------------------------------------------------------------------------


def sis_generator_g(p: SisParams, s: float) -> float:
    """Generator of g(s) = 1 - s along the SIS reduction.

    L0 g(s) = -(-beta s + mu + lambda + int_h * s)(1 - s); the drift part
    follows from g' = -1 and the jump part integrates the increment
    g(s + h s(1-s)) - g(s) = -h s(1-s) in closed form.
    """
    int_h = compute_jump_integrals(p.jumps).int_h
    return -(-p.beta * s + p.mu + p.lam + int_h * s) * (1.0 - s)


def sirs_generator_f(p: SirsParams, c: LyapunovConstants, x) -> float:
    """Generator of f(x) = c1 (x1-1)^2 + c2 x2^2 + c3 x3^2 for SIRS.

    Assembles the drift terms, the two second-order terms
    sigma^2 x1^2 x2^2 weighted by c1 and c2 (the cross second derivatives
    of f vanish), and the jump increments

        c2 [(x2 - j x2)^2 - x2^2] + c3 [(x3 + j x2)^2 - x3^2]

    integrated in closed form, which requires only int_j and int_j_sq.
    """
    if isinstance(x, SimplexState):
        x1, x2, x3 = x.coords
    else:
        x1, x2, x3 = (float(v) for v in x)
    ints = compute_jump_integrals(p.jumps)
    drift = (2.0 * c.c1 * (x1 - 1.0) * (-p.beta * x1 * x2 + p.delta * x3)
             + 2.0 * c.c2 * x2 * (p.beta * x1 * x2 - p.lam * x2)
             + 2.0 * c.c3 * x3 * (p.lam * x2 - p.delta * x3))
    second = p.sigma * p.sigma * x1 * x1 * x2 * x2 * (c.c1 + c.c2)
    jump = (c.c2 * x2 * x2 * (ints.int_h_sq - 2.0 * ints.int_h)
            + c.c3 * (2.0 * x2 * x3 * ints.int_h + x2 * x2 * ints.int_h_sq))
    return drift + second + jump
