"""SIS and SIRS model parameters, coefficient functions, and equilibria.

The stochastic SIS system lives on the 2-simplex (S, I) and is simulated
through its one-dimensional reduction in S (I = 1 - S):

    dS = alpha(S) dt + gamma(S) dW + h(y) S(1-S) dN,
    alpha(s) = -beta s(1-s) - mu s + mu + lambda (1-s),
    gamma(s) = -sigma s(1-s).

The stochastic SIRS system lives on the 3-simplex (S, I, R):

    dS = (-beta S I + delta R) dt - sigma S I dW,
    dI = ( beta S I - lambda I) dt + sigma S I dW - j(y) I dN,
    dR = ( lambda I - delta R ) dt              + j(y) I dN,

with a nonnegative jump function j modeling quarantine.  All coefficient
functions here are pure and safe for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jumps import JumpSpec, jump_values

SIMPLEX_SUM_TOL = 1e-9

DISEASE_FREE_STABLE = "disease_free_stable"
DISEASE_FREE_UNSTABLE = "disease_free_unstable"
ENDEMIC_STABLE = "endemic_stable"


# ---------------------------------------------------------------------------
# States and parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimplexState:
    """Point on the 2- or 3-simplex of compartment frequencies.

    Coordinates are (S, I) for SIS and (S, I, R) for SIRS; each lies in
    [0, 1] and they sum to 1 within ``SIMPLEX_SUM_TOL``.
    """

    coords: tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) not in (2, 3):
            raise ValueError(f"simplex state needs 2 or 3 coordinates, got {len(self.coords)}")
        for c in self.coords:
            if not (0.0 <= c <= 1.0):
                raise ValueError(f"coordinate {c} outside [0, 1]")
        total = sum(self.coords)
        if abs(total - 1.0) > SIMPLEX_SUM_TOL:
            raise ValueError(f"coordinates sum to {total!r}, not 1")

    @classmethod
    def sis(cls, s: float, i: float | None = None) -> "SimplexState":
        """SIS state from S, with I defaulting to 1 - S."""
        return cls((float(s), float(1.0 - s) if i is None else float(i)))

    @classmethod
    def sirs(cls, s: float, i: float, r: float) -> "SimplexState":
        return cls((float(s), float(i), float(r)))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def s(self) -> float:
        return self.coords[0]

    @property
    def i(self) -> float:
        return self.coords[1]

    @property
    def r(self) -> float:
        if len(self.coords) != 3:
            raise AttributeError("2-dimensional state has no R coordinate")
        return self.coords[2]

    def is_interior(self) -> bool:
        """True when every coordinate is strictly positive."""
        return all(c > 0.0 for c in self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


@dataclass(frozen=True)
class SisParams:
    """Stochastic SIS rates (per day) and jump specification.

    Attributes:
        beta: Average number of contacts per day.
        mu: Birth/death rate (newborns susceptible).
        lam: Recovery rate.
        sigma: Volatility of the contact rate.
        jumps: Finite-activity jump measure with signed jump function h.
    """

    beta: float
    mu: float
    lam: float
    sigma: float = 0.0
    jumps: JumpSpec = field(default_factory=lambda: JumpSpec.constant(0.0, 0.0))

    def __post_init__(self):
        for name in ("beta", "mu", "lam", "sigma"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class SirsParams:
    """Stochastic SIRS rates (per day) and nonnegative jump specification.

    Attributes:
        beta: Contact rate.
        lam: Recovery rate.
        delta: Rate at which recovered individuals become susceptible.
        sigma: Volatility of the contact rate.
        jumps: Jump measure; its function j must be nonnegative (quarantine).
    """

    beta: float
    lam: float
    delta: float
    sigma: float = 0.0
    jumps: JumpSpec = field(default_factory=lambda: JumpSpec.constant(0.0, 0.0))

    def __post_init__(self):
        for name in ("beta", "lam", "delta", "sigma"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not self.jumps.is_nonnegative:
            raise ValueError(
                f"SIRS jump function must be nonnegative, range is "
                f"[{self.jumps.jump_min}, {self.jumps.jump_max}]"
            )


def is_deterministic(params) -> bool:
    """True when both noise sources vanish (sigma = 0 and no jumps)."""
    return params.sigma == 0.0 and params.jumps.total_mass == 0.0


# ---------------------------------------------------------------------------
# Coefficient functions
# ---------------------------------------------------------------------------
# The shared-product forms below are mirrored verbatim by the compiled

# path kernels so reference and fast paths agree bit for bit.


def sis_drift(p: SisParams, s: float) -> float:
    """Drift alpha(s) = -beta s(1-s) - mu s + mu + lambda (1-s)."""
    si = s * (1.0 - s)
    return -p.beta * si - p.mu * s + p.mu + p.lam * (1.0 - s)


def sis_diffusion(p: SisParams, s: float) -> float:
    """Diffusion gamma(s) = -sigma s(1-s); vanishes at both boundaries."""
    return -p.sigma * (s * (1.0 - s))


def sis_jump_amplitude(p: SisParams, s: float, mark: float) -> float:
    """Instantaneous displacement of S at a jump: h(mark) s(1-s)."""
    return jump_values(p.jumps.jump, mark) * (s * (1.0 - s))


def sirs_coefficients(p: SirsParams, x, mark: float | None = None):
    """Drift, diffusion, and jump 3-vectors at state x = (S, I, R).

    Each returned vector sums to exactly zero: the last drift component
    is computed as the negative of the other two, which matches
    lambda I - delta R up to one rounding and keeps the simplex sum
    conserved in floating point.

    Args:
        p: SIRS parameters.
        x: State on the 3-simplex (SimplexState or length-3 sequence).
        mark: Optional jump mark; without it the jump vector is zero.

    Returns:
        Tuple of three ndarrays (drift, diffusion, jump).
    """
    if isinstance(x, SimplexState):
        s, i, r = x.coords
    else:
        s, i, r = (float(v) for v in x)
    bsi = p.beta * (s * i)
    d_s = -bsi + p.delta * r
    d_i = bsi - p.lam * i
    drift = np.array([d_s, d_i, -(d_s + d_i)])
    g = p.sigma * (s * i)
    diffusion = np.array([-g, g, 0.0])
    if mark is None:
        jump = np.zeros(3)
    else:
        jmp = jump_values(p.jumps.jump, mark) * i
        jump = np.array([0.0, -jmp, jmp])
    return drift, diffusion, jump


# ---------------------------------------------------------------------------
# Deterministic equilibria
# ---------------------------------------------------------------------------


def deterministic_equilibria(p) -> list[tuple[SimplexState, str]]:
    """Equilibria of the noise-free system with stability classification.

    The disease-free equilibrium is always returned.  When the contact
    rate exceeds the deterministic threshold (beta > mu + lambda for SIS,
    beta > lambda for SIRS) the endemic equilibrium exists, is the
    globally stable point, and is appended; the disease-free entry is
    then classified unstable.

    Returns:
        List of (state, classification) pairs, classification one of
        ``disease_free_stable``, ``disease_free_unstable``,
        ``endemic_stable``.
    """
    if isinstance(p, SisParams):
        threshold = p.mu + p.lam
        if p.beta <= threshold:
            return [(SimplexState.sis(1.0, 0.0), DISEASE_FREE_STABLE)]
        s_star = threshold / p.beta
        return [
            (SimplexState.sis(1.0, 0.0), DISEASE_FREE_UNSTABLE),
            (SimplexState.sis(s_star, 1.0 - s_star), ENDEMIC_STABLE),
        ]
    if isinstance(p, SirsParams):
        if p.beta <= p.lam:
            return [(SimplexState.sirs(1.0, 0.0, 0.0), DISEASE_FREE_STABLE)]
        s_star = p.lam / p.beta
        r_star = (1.0 - s_star) / (1.0 + p.delta / p.lam)
        i_star = 1.0 - s_star - r_star
        return [
            (SimplexState.sirs(1.0, 0.0, 0.0), DISEASE_FREE_UNSTABLE),
            (SimplexState.sirs(s_star, i_star, r_star), ENDEMIC_STABLE),
        ]
    raise TypeError(f"expected SisParams or SirsParams, got {type(p).__name__}")
