"""Finite-activity jump specifications and compound-Poisson event sampling.

A :class:`JumpSpec` bundles the three ingredients of the jump term: the
total intensity mass (expected jumps per unit time), the mark law that
jump sizes are drawn from, and the jump function mapping a mark to the
fractional displacement applied at a jump.  The displacement must stay
strictly inside (-1, 1) so a jump can never push a frequency across the
simplex boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .rng import RngStream

PROB_TOL = 1e-12

# ---------------------------------------------------------------------------
# Mark distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointMass:
    """Degenerate mark law: every jump carries the same mark."""

    value: float = 0.0


@dataclass(frozen=True)
class UniformMarks:
    """Marks drawn uniformly from [low, high]."""

    low: float
    high: float

    def __post_init__(self):
        if not self.high > self.low:
            raise ValueError(f"uniform marks need high > low, got [{self.low}, {self.high}]")


@dataclass(frozen=True)
class DiscreteMarks:
    """Marks drawn from a finite list of (value, probability) pairs."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0 or len(self.values) != len(self.probs):
            raise ValueError("discrete marks need matching, non-empty values and probs")
        if any(p < 0.0 for p in self.probs):
            raise ValueError("discrete mark probabilities must be non-negative")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"discrete mark probabilities sum to {total!r}, not 1")


MarkDistribution = Union[PointMass, UniformMarks, DiscreteMarks]


def mark_support(dist: MarkDistribution) -> tuple[float, float]:
    """Smallest closed interval containing all possible marks."""
    if isinstance(dist, PointMass):
        return dist.value, dist.value
    if isinstance(dist, UniformMarks):
        return dist.low, dist.high
    if isinstance(dist, DiscreteMarks):
        return min(dist.values), max(dist.values)
    raise TypeError(f"unknown mark distribution {dist!r}")


def sample_marks(dist: MarkDistribution, stream: RngStream, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. marks from the distribution."""
    if n == 0:
        return np.empty(0)
    if isinstance(dist, PointMass):
        return np.full(n, dist.value)
    if isinstance(dist, UniformMarks):
        return dist.low + (dist.high - dist.low) * stream.random(n)
    if isinstance(dist, DiscreteMarks):
        values = np.asarray(dist.values)
        probs = np.asarray(dist.probs, dtype=float)
        idx = stream.generator.choice(len(values), size=n, p=probs / probs.sum())
        return values[idx]
    raise TypeError(f"unknown mark distribution {dist!r}")


def mark_nodes(dist: MarkDistribution, n_uniform: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and probability weights for expectations over marks.

    Point-mass and discrete laws are represented exactly; the uniform law
    uses ``n_uniform`` Gauss-Legendre nodes (weights normalized to sum 1).
    """
    if isinstance(dist, PointMass):
        return np.array([dist.value]), np.array([1.0])
    if isinstance(dist, DiscreteMarks):
        return np.asarray(dist.values), np.asarray(dist.probs, dtype=float)
    if isinstance(dist, UniformMarks):
        nodes, weights = np.polynomial.legendre.leggauss(n_uniform)
        mid = 0.5 * (dist.low + dist.high)
        half = 0.5 * (dist.high - dist.low)
        return mid + half * nodes, weights / weights.sum()
    raise TypeError(f"unknown mark distribution {dist!r}")


# ---------------------------------------------------------------------------
# Jump functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantJump:
    """Mark-independent displacement fraction."""

    value: float = 0.0


@dataclass(frozen=True)
class PiecewiseLinearJump:
    """Displacement interpolated linearly between (knot, value) pairs."""

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.knots) < 2 or len(self.knots) != len(self.values):
            raise ValueError("piecewise-linear jump needs >= 2 matching knots and values")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError("piecewise-linear knots must be strictly increasing")


JumpFunction = Union[ConstantJump, PiecewiseLinearJump]


def jump_values(fn: JumpFunction, marks):
    """Evaluate the jump function at one mark or an array of marks."""
    if isinstance(fn, ConstantJump):
        if np.isscalar(marks):
            return fn.value
        return np.full(np.shape(marks), fn.value)
    if isinstance(fn, PiecewiseLinearJump):
        out = np.interp(marks, fn.knots, fn.values)
        return float(out) if np.isscalar(marks) else out
    raise TypeError(f"unknown jump function {fn!r}")


def _jump_extremes(fn: JumpFunction, dist: MarkDistribution) -> tuple[float, float]:
    """Exact min/max of the jump function over the mark support.

    Piecewise-linear functions attain extremes at knots or support
    endpoints, so a finite candidate scan is exact.
    """
    if isinstance(fn, ConstantJump):
        return fn.value, fn.value
    lo, hi = mark_support(dist)
    if lo < fn.knots[0] or hi > fn.knots[-1]:
        raise ValueError(
            f"mark support [{lo}, {hi}] extends beyond jump-function knots "
            f"[{fn.knots[0]}, {fn.knots[-1]}]"
        )
    if isinstance(dist, DiscreteMarks):
        candidates = np.asarray(dist.values)
    elif isinstance(dist, PointMass):
        candidates = np.array([dist.value])
    else:
        inner = [k for k in fn.knots if lo < k < hi]
        candidates = np.array([lo, *inner, hi])
    vals = jump_values(fn, candidates)
    return float(np.min(vals)), float(np.max(vals))


# ---------------------------------------------------------------------------
# Jump specification and integrals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JumpSpec:
    """Finite-activity jump measure: intensity mass, mark law, jump function.

    ``total_mass`` is the expected number of jumps per unit time.  The
    jump function must map every possible mark strictly inside (-1, 1).

    Attributes:
        total_mass: Total intensity, >= 0 and finite.
        marks: Mark distribution.
        jump: Displacement fraction as a function of the mark.
    """

    total_mass: float
    marks: MarkDistribution = field(default_factory=PointMass)
    jump: JumpFunction = field(default_factory=ConstantJump)

    def __post_init__(self):
        if not (math.isfinite(self.total_mass) and self.total_mass >= 0.0):
            raise ValueError(f"total_mass must be finite and >= 0, got {self.total_mass}")
        lo, hi = _jump_extremes(self.jump, self.marks)
        if not (-1.0 < lo and hi < 1.0):
            raise ValueError(
                f"jump function range [{lo}, {hi}] must lie strictly inside (-1, 1)"
            )

    @classmethod
    def constant(cls, total_mass: float, value: float) -> "JumpSpec":
        """Spec with a constant jump function, the form every figure uses."""
        return cls(total_mass=total_mass, marks=PointMass(0.0), jump=ConstantJump(value))

    @property
    def jump_min(self) -> float:
        return _jump_extremes(self.jump, self.marks)[0]

    @property
    def jump_max(self) -> float:
        return _jump_extremes(self.jump, self.marks)[1]

    @property
    def is_nonnegative(self) -> bool:
        """True when the jump function is >= 0 on the whole mark support."""
        return self.jump_min >= 0.0


@dataclass(frozen=True)
class JumpIntegrals:
    """First and second moments of the jump function against the intensity.

    ``int_h`` is the integral of h over the intensity measure and
    ``int_h_sq`` the integral of h squared; both scale linearly with
    ``total_mass``.
    """

    int_h: float
    int_h_sq: float


def compute_jump_integrals(spec: JumpSpec) -> JumpIntegrals:
    """Closed-form moments of the jump function under the intensity measure.

    Constant jump functions and point-mass/discrete marks are exact by
    direct arithmetic.  Piecewise-linear functions against uniform marks
    are integrated piece by piece with the exact linear/quadratic
    primitives, so the result is accurate to machine precision.
    """
    mass = spec.total_mass
    fn = spec.jump
    dist = spec.marks
    if isinstance(fn, ConstantJump):
        mean_h, mean_h2 = fn.value, fn.value * fn.value
    elif isinstance(dist, PointMass):
        h = jump_values(fn, dist.value)
        mean_h, mean_h2 = h, h * h
    elif isinstance(dist, DiscreteMarks):
        h = np.asarray(jump_values(fn, np.asarray(dist.values)))
        p = np.asarray(dist.probs, dtype=float)
        mean_h = float(np.dot(p, h))
        mean_h2 = float(np.dot(p, h * h))
    elif isinstance(dist, UniformMarks):
        lo, hi = dist.low, dist.high
        cuts = sorted({lo, hi, *(k for k in fn.knots if lo < k < hi)})
        acc_h = 0.0
        acc_h2 = 0.0
        for a, b in zip(cuts, cuts[1:]):
            ha = jump_values(fn, a)
            hb = jump_values(fn, b)
            acc_h += (b - a) * 0.5 * (ha + hb)
            acc_h2 += (b - a) * (ha * ha + ha * hb + hb * hb) / 3.0
        mean_h = acc_h / (hi - lo)
        mean_h2 = acc_h2 / (hi - lo)
    else:
        raise TypeError(f"unknown mark distribution {dist!r}")
    return JumpIntegrals(int_h=mass * mean_h, int_h_sq=mass * mean_h2)


# ---------------------------------------------------------------------------
# Event sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JumpEvents:
    """Jump times (strictly increasing) and their i.i.d. marks."""

    times: np.ndarray
    marks: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self):
        return iter(zip(self.times.tolist(), self.marks.tolist()))


def sample_jump_events(stream: RngStream, spec: JumpSpec, t0: float, t1: float) -> JumpEvents:
    """Sample the compound-Poisson events landing in (t0, t1].

    Event times form a Poisson process of rate ``spec.total_mass`` built
    from exponential inter-arrivals (finite activity makes thinning
    unnecessary); marks are drawn i.i.d. afterwards.  The stream consumes
    inter-arrival draws in fixed-size batches, then one batch of marks,
    so the result depends only on the stream state and the arguments.

    Raises:
        ValueError: If ``t1 <= t0``.
    """
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got t0={t0}, t1={t1}")
    if spec.total_mass == 0.0:
        return JumpEvents(times=np.empty(0), marks=np.empty(0))
    scale = 1.0 / spec.total_mass
    expected = spec.total_mass * (t1 - t0)
    chunk = max(16, int(expected + 4.0 * math.sqrt(expected) + 16.0))
    arrivals = [np.empty(0)]
    last = t0
    while last <= t1:
        gaps = stream.exponential(scale, chunk)
        times = last + np.cumsum(gaps)
        arrivals.append(times)
        last = times[-1]
    times = np.concatenate(arrivals)
    times = times[times <= t1]
    marks = sample_marks(spec.marks, stream, len(times))
    return JumpEvents(times=times, marks=marks)
