"""Tests for model parameters, coefficient functions, and equilibria."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from levy_epidemic import (JumpSpec, SimplexState, SirsParams, SisParams,
                           deterministic_equilibria, sirs_coefficients,
                           sis_diffusion, sis_drift, sis_jump_amplitude)

FIG1A = SisParams(beta=0.1, mu=0.2, lam=0.3, sigma=0.3,
                  jumps=JumpSpec.constant(1.0, -0.01))
FIG3A = SirsParams(beta=0.3, lam=0.29, delta=0.4, sigma=0.1,
                   jumps=JumpSpec.constant(1.0, 0.3))


# ---------------------------------------------------------------------------
# SimplexState and parameter validation
# ---------------------------------------------------------------------------


def test_simplex_state_validation():
    SimplexState.sis(0.6, 0.4)
    SimplexState.sirs(0.3, 0.6, 0.1)
    with pytest.raises(ValueError):
        SimplexState((0.5, 0.6))
    with pytest.raises(ValueError):
        SimplexState((-0.1, 1.1))
    with pytest.raises(ValueError):
        SimplexState((1.0,))


def test_simplex_state_accessors():
    x = SimplexState.sirs(0.3, 0.6, 0.1)
    assert (x.s, x.i, x.r) == (0.3, 0.6, 0.1)
    assert x.dim == 3
    assert x.is_interior()
    assert not SimplexState.sis(1.0, 0.0).is_interior()
    with pytest.raises(AttributeError):
        SimplexState.sis(0.5).r


def test_rates_must_be_nonnegative():
    with pytest.raises(ValueError):
        SisParams(beta=-0.1, mu=0.1, lam=0.1)
    with pytest.raises(ValueError):
        SirsParams(beta=0.1, lam=-0.1, delta=0.1)


def test_sirs_requires_nonnegative_jump_function():
    with pytest.raises(ValueError):
        SirsParams(beta=0.1, lam=0.1, delta=0.1,
                   jumps=JumpSpec.constant(1.0, -0.01))


# ---------------------------------------------------------------------------
# SIS coefficients
# ---------------------------------------------------------------------------


def test_sis_drift_vanishes_at_disease_free_point():
    assert sis_drift(FIG1A, 1.0) == 0.0


def test_sis_drift_hand_value():
    # -0.1*0.6*0.4 - 0.2*0.6 + 0.2 + 0.3*0.4 = 0.176
    assert sis_drift(FIG1A, 0.6) == pytest.approx(0.176, abs=1e-15)


def test_sis_drift_at_deterministic_threshold():
    p = SisParams(beta=0.5, mu=0.2, lam=0.3)
    assert sis_drift(p, 1.0) == 0.0


def test_sis_diffusion_values():
    p = SisParams(beta=0.1, mu=0.1, lam=0.1, sigma=0.3)
    assert sis_diffusion(p, 0.0) == 0.0
    assert sis_diffusion(p, 1.0) == 0.0
    assert sis_diffusion(p, 0.5) == pytest.approx(-0.075, abs=1e-16)
    assert sis_diffusion(SisParams(beta=0.1, mu=0.1, lam=0.1, sigma=0.0), 0.3) == 0.0


def test_sis_jump_amplitude_values():
    assert sis_jump_amplitude(FIG1A, 0.0, 0.0) == 0.0
    assert sis_jump_amplitude(FIG1A, 1.0, 0.0) == 0.0
    assert sis_jump_amplitude(FIG1A, 0.6, 0.0) == pytest.approx(-0.0024, abs=1e-18)
    # s(1-s) is maximal at s = 1/2
    p = SisParams(beta=0.0, mu=0.0, lam=0.0, jumps=JumpSpec.constant(1.0, 0.2))
    assert sis_jump_amplitude(p, 0.5, 0.0) == pytest.approx(0.05, abs=1e-17)


def test_sis_drift_conserves_total_frequency():
    # companion I-drift beta*s*i - (lam+mu)*i cancels the S-drift when i = 1-s
    for s in np.linspace(0.0, 1.0, 101):
        i = 1.0 - s
        drift_i = FIG1A.beta * s * i - (FIG1A.lam + FIG1A.mu) * i
        assert sis_drift(FIG1A, s) + drift_i == pytest.approx(0.0, abs=1e-15)


# ---------------------------------------------------------------------------
# SIRS coefficients
# ---------------------------------------------------------------------------


def test_sirs_coefficients_vanish_at_disease_free_equilibrium():
    drift, diffusion, jump = sirs_coefficients(FIG3A, (1.0, 0.0, 0.0), mark=0.0)
    assert np.all(drift == 0.0)
    assert np.all(diffusion == 0.0)
    assert np.all(jump == 0.0)


def test_sirs_drift_hand_value():
    drift, _, _ = sirs_coefficients(FIG3A, (0.3, 0.6, 0.1))
    assert drift == pytest.approx([-0.014, -0.12, 0.134], abs=1e-15)


def test_sirs_vectors_sum_to_zero_exactly():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.dirichlet([1.0, 1.0, 1.0])
        drift, diffusion, jump = sirs_coefficients(FIG3A, x, mark=0.0)
        assert drift.sum() == 0.0
        assert diffusion.sum() == 0.0
        assert jump.sum() == 0.0


def test_sirs_jump_vector_requires_mark():
    _, _, jump = sirs_coefficients(FIG3A, (0.3, 0.6, 0.1))
    assert np.all(jump == 0.0)
    _, _, jump = sirs_coefficients(FIG3A, (0.3, 0.6, 0.1), mark=0.0)
    assert jump[1] == pytest.approx(-0.18, abs=1e-15)
    assert jump[2] == -jump[1]


# ---------------------------------------------------------------------------
# Equilibria
# ---------------------------------------------------------------------------


def test_sis_endemic_equilibrium():
    p = SisParams(beta=0.8, mu=0.1, lam=0.2)
    eqs = deterministic_equilibria(p)
    assert len(eqs) == 2
    (dfe, dfe_cls), (endemic, endemic_cls) = eqs
    assert dfe.coords == (1.0, 0.0)
    assert dfe_cls == "disease_free_unstable"
    assert endemic_cls == "endemic_stable"
    assert endemic.s == pytest.approx(0.375, abs=1e-15)
    assert endemic.i == pytest.approx(0.625, abs=1e-15)


def test_sis_subcritical_has_only_disease_free():
    p = SisParams(beta=0.3, mu=0.2, lam=0.3)
    eqs = deterministic_equilibria(p)
    assert len(eqs) == 1
    assert eqs[0][0].coords == (1.0, 0.0)
    assert eqs[0][1] == "disease_free_stable"


def test_sis_zero_contact_rate():
    eqs = deterministic_equilibria(SisParams(beta=0.0, mu=0.1, lam=0.1))
    assert len(eqs) == 1
    assert eqs[0][1] == "disease_free_stable"


def test_sirs_endemic_equilibrium_against_ode_oracle():
    p = SirsParams(beta=0.8, lam=0.1, delta=0.1)
    eqs = deterministic_equilibria(p)
    endemic = eqs[1][0]
    assert endemic.coords == pytest.approx((0.125, 0.4375, 0.4375), abs=1e-15)

    def rhs(_, y):
        s, i, r = y
        return [-p.beta * s * i + p.delta * r,
                p.beta * s * i - p.lam * i,
                p.lam * i - p.delta * r]

    sol = solve_ivp(rhs, (0.0, 3000.0), [0.3, 0.6, 0.1], rtol=1e-10, atol=1e-12)
    assert sol.y[:, -1] == pytest.approx(endemic.coords, abs=1e-6)


def test_equilibria_are_roots_of_the_drift():
    for params in (SisParams(beta=0.8, mu=0.1, lam=0.2),
                   SisParams(beta=0.2, mu=0.2, lam=0.3)):
        for state, _ in deterministic_equilibria(params):
            assert abs(sis_drift(params, state.s)) < 1e-12
    for params in (SirsParams(beta=0.8, lam=0.1, delta=0.1),
                   SirsParams(beta=0.1, lam=0.3, delta=0.2)):
        for state, _ in deterministic_equilibria(params):
            drift, _, _ = sirs_coefficients(params, state)
            assert np.max(np.abs(drift)) < 1e-12
