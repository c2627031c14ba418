"""Built-in parameter sets for the six reference trajectory panels.

Four SIS panels start from (S, I) = (0.6, 0.4) and two SIRS panels from
(S, I, R) = (0.3, 0.6, 0.1).  All use constant jump functions, so the
jump integrals are exact products.
"""

from __future__ import annotations

from dataclasses import dataclass

from .jumps import JumpSpec, compute_jump_integrals
from .models import SimplexState, SisParams, SirsParams
from .stability import (StabilityVerdict, sis_deterministic_threshold,
                        sis_dfe_condition, sis_dfe_condition_positive,
                        sirs_dfe_condition)


@dataclass(frozen=True)
class Panel:
    """One reference panel: model parameters plus the initial condition."""

    name: str
    params: SisParams | SirsParams
    x0: SimplexState
    title: str

    @property
    def model(self) -> str:
        return "sis" if isinstance(self.params, SisParams) else "sirs"


_SIS_X0 = SimplexState.sis(0.6, 0.4)
_SIRS_X0 = SimplexState.sirs(0.3, 0.6, 0.1)

PANELS: dict[str, Panel] = {
    "fig1a": Panel(
        name="fig1a",
        params=SisParams(beta=0.1, mu=0.2, lam=0.3, sigma=0.3,
                         jumps=JumpSpec.constant(1.0, -0.01)),
        x0=_SIS_X0,
        title="SIS, negative jump integral: disease-free stable",
    ),
    "fig1b": Panel(
        name="fig1b",
        params=SisParams(beta=0.4, mu=0.1, lam=0.3, sigma=0.3,
                         jumps=JumpSpec.constant(0.5, 0.1)),
        x0=_SIS_X0,
        title="SIS, positive jumps: disease-free stable",
    ),
    "fig2a": Panel(
        name="fig2a",
        params=SisParams(beta=0.4, mu=0.15, lam=0.3, sigma=0.3,
                         jumps=JumpSpec.constant(1.0, -0.1)),
        x0=_SIS_X0,
        title="SIS, negative jump integral: epidemic",
    ),
    "fig2b": Panel(
        name="fig2b",
        params=SisParams(beta=0.8, mu=0.1, lam=0.2, sigma=0.3,
                         jumps=JumpSpec.constant(2.0, 0.1)),
        x0=_SIS_X0,
        title="SIS, positive jumps: epidemic",
    ),
    "fig3a": Panel(
        name="fig3a",
        params=SirsParams(beta=0.3, lam=0.29, delta=0.4, sigma=0.1,
                          jumps=JumpSpec.constant(1.0, 0.3)),
        x0=_SIRS_X0,
        title="SIRS: convergence to the disease-free equilibrium",
    ),
    "fig3b": Panel(
        name="fig3b",
        params=SirsParams(beta=0.8, lam=0.1, delta=0.1, sigma=0.2,
                          jumps=JumpSpec.constant(0.5, 0.1)),
        x0=_SIRS_X0,
        title="SIRS: an epidemic",
    ),
}


@dataclass(frozen=True)
class VerdictRow:
    """One row of the panel stability table."""

    panel: str
    beta: float
    threshold: float
    holds: bool
    rule: str


def panel_verdict(panel: Panel) -> VerdictRow:
    """Stability verdict for one panel.

    SIS panels with a negative jump integral use the stochastic
    threshold mu + lambda + int_h (strict inequality).  SIS panels with
    nonnegative jumps fall back to the deterministic threshold
    mu + lambda, stable for beta <= mu + lambda; positive jumps only
    assist convergence, so the deterministic verdict is the conservative
    table entry.  SIRS panels use the stochastic SIRS threshold.
    """
    p = panel.params
    if isinstance(p, SirsParams):
        verdict = sirs_dfe_condition(p)
        return VerdictRow(panel.name, p.beta, verdict.threshold_value,
                          verdict.condition_holds, rule="sirs_stochastic")
    int_h = compute_jump_integrals(p.jumps).int_h
    if int_h < 0.0:
        verdict = sis_dfe_condition(p)
        return VerdictRow(panel.name, p.beta, verdict.threshold_value,
                          verdict.condition_holds, rule="sis_stochastic")
    threshold = sis_deterministic_threshold(p)
    return VerdictRow(panel.name, p.beta, threshold, p.beta <= threshold,
                      rule="sis_deterministic")


def verdict_table() -> list[VerdictRow]:
    """Verdict rows for all six panels, in panel order."""
    return [panel_verdict(panel) for panel in PANELS.values()]


def stochastic_verdict(params) -> StabilityVerdict:
    """Dispatch to the applicable stochastic condition evaluator."""
    if isinstance(params, SirsParams):
        return sirs_dfe_condition(params)
    if compute_jump_integrals(params.jumps).int_h < 0.0:
        return sis_dfe_condition(params)
    return sis_dfe_condition_positive(params)
