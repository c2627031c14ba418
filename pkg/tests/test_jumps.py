"""Tests for jump specifications, event sampling, and exact moment integrals."""

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from levy_epidemic import (ConstantJump, DiscreteMarks, JumpSpec,
                           PiecewiseLinearJump, PointMass, RngStream,
                           UniformMarks, compute_jump_integrals,
                           sample_jump_events)
from levy_epidemic.jumps import jump_values, mark_nodes


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def test_discrete_probs_must_sum_to_one():
    with pytest.raises(ValueError):
        DiscreteMarks(values=(0.0, 1.0), probs=(0.5, 0.5 + 1e-6))
    DiscreteMarks(values=(0.0, 1.0), probs=(0.5, 0.5))  # exact sum passes


def test_jump_function_must_stay_inside_unit_interval():
    with pytest.raises(ValueError):
        JumpSpec.constant(1.0, 1.0)
    with pytest.raises(ValueError):
        JumpSpec.constant(1.0, -1.0)
    JumpSpec.constant(1.0, 0.999)


def test_piecewise_range_checked_over_mark_support():
    fn = PiecewiseLinearJump(knots=(-1.0, 0.0, 1.0), values=(-0.95, 0.5, 2.0))
    # support excludes the knot where the function exceeds 1
    JumpSpec(total_mass=1.0, marks=UniformMarks(-0.5, 0.2), jump=fn)
    with pytest.raises(ValueError):
        JumpSpec(total_mass=1.0, marks=UniformMarks(-0.5, 0.9), jump=fn)


def test_mark_support_must_be_covered_by_knots():
    fn = PiecewiseLinearJump(knots=(0.0, 1.0), values=(0.0, 0.1))
    with pytest.raises(ValueError):
        JumpSpec(total_mass=1.0, marks=UniformMarks(-0.5, 0.5), jump=fn)


def test_total_mass_must_be_finite_nonnegative():
    with pytest.raises(ValueError):
        JumpSpec.constant(-1.0, 0.0)
    with pytest.raises(ValueError):
        JumpSpec.constant(float("inf"), 0.0)


def test_nonnegativity_flag():
    assert JumpSpec.constant(1.0, 0.1).is_nonnegative
    assert JumpSpec.constant(1.0, 0.0).is_nonnegative
    assert not JumpSpec.constant(1.0, -0.01).is_nonnegative


# ---------------------------------------------------------------------------
# Event sampling
# ---------------------------------------------------------------------------


def test_zero_mass_yields_no_events():
    spec = JumpSpec.constant(0.0, 0.0)
    events = sample_jump_events(RngStream(0, 0), spec, 0.0, 100.0)
    assert len(events) == 0


def test_window_must_be_increasing():
    spec = JumpSpec.constant(1.0, 0.1)
    with pytest.raises(ValueError):
        sample_jump_events(RngStream(0, 0), spec, 1.0, 1.0)


def test_event_times_strictly_increasing_within_window():
    spec = JumpSpec.constant(2.0, 0.1)
    events = sample_jump_events(RngStream(5, 0), spec, 10.0, 60.0)
    assert np.all(np.diff(events.times) > 0)
    assert events.times[0] > 10.0
    assert events.times[-1] <= 60.0
    assert len(events.marks) == len(events.times)


def test_point_mass_marks_are_constant():
    spec = JumpSpec(total_mass=1.0, marks=PointMass(0.7), jump=ConstantJump(0.1))
    events = sample_jump_events(RngStream(1, 0), spec, 0.0, 200.0)
    assert len(events) > 0
    assert np.all(events.marks == 0.7)


def test_mean_event_count_matches_poisson_rate():
    # mean count over many windows within 1% of rate * length
    spec = JumpSpec.constant(1.0, 0.1)
    n_windows = 10_000
    length = 500.0
    counts = np.array([
        len(sample_jump_events(RngStream(77, i), spec, 0.0, length))
        for i in range(n_windows)
    ])
    assert abs(counts.mean() - length) < 0.01 * length


def test_interarrival_times_are_exponential():
    spec = JumpSpec.constant(0.8, 0.1)
    stream = RngStream(2718, 0)
    gaps = []
    t0 = 0.0
    while len(gaps) < 10_000:
        events = sample_jump_events(stream, spec, t0, t0 + 2000.0)
        times = np.concatenate(([t0], events.times))
        gaps.extend(np.diff(times))
        t0 += 2000.0
    gaps = np.array(gaps[:10_000])
    result = stats.kstest(gaps, "expon", args=(0.0, 1.0 / 0.8))
    assert result.pvalue > 0.01


def test_sampling_is_reproducible():
    spec = JumpSpec(total_mass=1.5, marks=UniformMarks(-0.2, 0.4),
                    jump=ConstantJump(0.05))
    a = sample_jump_events(RngStream(9, 4), spec, 0.0, 50.0)
    b = sample_jump_events(RngStream(9, 4), spec, 0.0, 50.0)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.marks, b.marks)


def test_discrete_mark_frequencies():
    spec = JumpSpec(total_mass=2.0,
                    marks=DiscreteMarks(values=(-1.0, 2.0), probs=(0.25, 0.75)),
                    jump=ConstantJump(0.0))
    events = sample_jump_events(RngStream(31, 0), spec, 0.0, 20_000.0)
    frac = np.mean(events.marks == 2.0)
    assert abs(frac - 0.75) < 0.02


# ---------------------------------------------------------------------------
# Moment integrals
# ---------------------------------------------------------------------------


def test_constant_integrals_exact():
    # figure-caption cases: constant jump functions with unit and half mass
    ints = compute_jump_integrals(JumpSpec.constant(1.0, -0.01))
    assert ints.int_h == -0.01
    assert ints.int_h_sq == 0.0001
    ints = compute_jump_integrals(JumpSpec.constant(1.0, 0.3))
    assert ints.int_h == 0.3
    assert ints.int_h_sq == 0.3 * 0.3
    ints = compute_jump_integrals(JumpSpec.constant(17.0, 0.0))
    assert ints.int_h == 0.0 and ints.int_h_sq == 0.0


def test_constant_integral_scales_with_mass():
    ints = compute_jump_integrals(JumpSpec.constant(2.0, 0.1))
    assert ints.int_h == pytest.approx(0.2, rel=1e-15)
    assert ints.int_h_sq == pytest.approx(0.02, rel=1e-15)


def test_piecewise_times_discrete_is_hand_sum():
    fn = PiecewiseLinearJump(knots=(-1.0, 0.0, 1.0), values=(-0.3, 0.1, 0.2))
    marks = DiscreteMarks(values=(-0.5, 0.5), probs=(0.4, 0.6))
    ints = compute_jump_integrals(JumpSpec(total_mass=3.0, marks=marks, jump=fn))
    h_lo = -0.1  # linear midpoint of (-0.3, 0.1)
    h_hi = 0.15  # linear midpoint of (0.1, 0.2)
    expect_h = 3.0 * (0.4 * h_lo + 0.6 * h_hi)
    expect_h2 = 3.0 * (0.4 * h_lo ** 2 + 0.6 * h_hi ** 2)
    assert ints.int_h == pytest.approx(expect_h, rel=1e-14)
    assert ints.int_h_sq == pytest.approx(expect_h2, rel=1e-14)


def test_piecewise_times_uniform_matches_quadrature_oracle():
    fn = PiecewiseLinearJump(knots=(-1.0, 0.0, 1.0), values=(-0.3, 0.1, 0.2))
    marks = UniformMarks(-0.5, 0.8)
    spec = JumpSpec(total_mass=1.7, marks=marks, jump=fn)
    ints = compute_jump_integrals(spec)
    density = 1.0 / (0.8 + 0.5)
    oracle_h = 1.7 * quad(lambda y: jump_values(fn, y) * density, -0.5, 0.8,
                          points=[0.0])[0]
    oracle_h2 = 1.7 * quad(lambda y: jump_values(fn, y) ** 2 * density, -0.5, 0.8,
                           points=[0.0])[0]
    assert ints.int_h == pytest.approx(oracle_h, rel=1e-12)
    assert ints.int_h_sq == pytest.approx(oracle_h2, rel=1e-12)


def test_integral_bounds():
    spec = JumpSpec(total_mass=2.5, marks=UniformMarks(-1.0, 1.0),
                    jump=PiecewiseLinearJump(knots=(-1.0, 1.0), values=(-0.9, 0.9)))
    ints = compute_jump_integrals(spec)
    assert abs(ints.int_h) <= spec.total_mass
    assert 0.0 <= ints.int_h_sq <= spec.total_mass


def test_mark_nodes_weights_sum_to_one():
    for dist in (PointMass(0.3), UniformMarks(-1.0, 2.0),
                 DiscreteMarks(values=(0.0, 1.0, 2.0), probs=(0.2, 0.3, 0.5))):
        _, weights = mark_nodes(dist)
        assert np.sum(weights) == pytest.approx(1.0, abs=1e-12)
