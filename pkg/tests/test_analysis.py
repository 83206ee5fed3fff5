"""Diagnostics: invariants, symplectic probe, reversibility, circle oracle."""

import math

import numpy as np
import pytest

from magbilliards.analysis import (
    circle_field_oracle,
    joachimsthal,
    joachimsthal_values,
    probe_symplectic,
    reversibility_defect,
    reversibility_defect_many,
    symplectic_defect,
    theta_at_arc_length,
)
from magbilliards.boundary import TWO_PI, BoundaryCurve
from magbilliards.errors import NoSecondIntersection, ProbeFailure
from magbilliards.stepper import (
    NO_FIELD,
    BoundaryState,
    FieldParams,
    PhasePoint,
    billiard_step,
    phase_to_state,
    step_many,
)

ELLIPSE = BoundaryCurve(10.0, 8.0)
CIRCLE = BoundaryCurve(10.0, 10.0)


def wrapped_angle_gap(a, b):
    gap = abs(a - b)
    return min(gap, TWO_PI - gap)


def test_joachimsthal_examples():
    st = phase_to_state(CIRCLE, PhasePoint(0.0, 0.0))
    assert joachimsthal(CIRCLE, st) == pytest.approx(-0.1, abs=1e-12)
    st = BoundaryState(np.array([10.0, 0.0]), np.array([0.0, 1.0]))
    assert joachimsthal(ELLIPSE, st) == pytest.approx(0.0, abs=1e-15)


def test_joachimsthal_conserved_along_orbit():
    """B=0 ellipse: J identical within 1e-8 across 1000 consecutive steps."""
    rng = np.random.default_rng(19)
    tp = rng.uniform(0, TWO_PI, 8)
    tv = rng.uniform(-1.4, 1.4, 8)
    j0 = joachimsthal_values(ELLIPSE, tp, tv)
    for _ in range(1000):
        out = step_many(ELLIPSE, tp, tv, NO_FIELD)
        tp, tv = out.theta_pos, out.theta_vel
        assert np.max(np.abs(joachimsthal_values(ELLIPSE, tp, tv) - j0)) <= 1e-8


def test_theta_at_arc_length_inverts_arc_length():
    rng = np.random.default_rng(6)
    for curve in (ELLIPSE, BoundaryCurve(10.0, 11.18, 2.005)):
        for theta in rng.uniform(0.0, TWO_PI, 20):
            s = curve.arc_length_between(0.0, theta)
            assert theta_at_arc_length(curve, s) == pytest.approx(theta, abs=1e-12)


def test_symplectic_defect_circle_shear():
    """Circle B=0 map is the shear (s, phi) -> (s + R(pi - 2 phi), phi)."""
    for z in (PhasePoint(0.7, 0.3), PhasePoint(4.0, -1.1), PhasePoint(0.0, 0.0)):
        assert symplectic_defect(CIRCLE, z) <= 1e-6


def test_symplectic_defect_sweeps():
    rng = np.random.default_rng(29)
    cases = [
        (ELLIPSE, FieldParams(0.5)),
        (BoundaryCurve(10.0, 11.18, 2.005), NO_FIELD),
        (BoundaryCurve(10.0, 11.18, 2.005), FieldParams(2.0)),
    ]
    for curve, fld in cases:
        for _ in range(20):
            z = PhasePoint(rng.uniform(0, TWO_PI), rng.uniform(-1.3, 1.3))
            assert symplectic_defect(curve, z, fld) <= 1e-4


def test_symplectic_probe_wraps_inputs():
    probe = probe_symplectic(CIRCLE, PhasePoint(1.0, 0.2))
    assert probe.fd_step == 1e-5
    assert probe.defect >= 0.0
    assert probe.base_point.theta_pos == 1.0


def test_symplectic_defect_rejects_bad_stencil():
    with pytest.raises(ProbeFailure):
        symplectic_defect(CIRCLE, PhasePoint(0.0, math.pi / 2 - 1e-7))
    with pytest.raises(ValueError):
        symplectic_defect(CIRCLE, PhasePoint(0.0, 0.0), fd_step=0.0)


def test_reversibility_period_two_palindrome():
    assert reversibility_defect(CIRCLE, PhasePoint(0.0, 0.0), NO_FIELD, 2) == 0.0


def test_reversibility_sweeps():
    rng = np.random.default_rng(37)
    for fld in (NO_FIELD, FieldParams(1.0)):
        tp = rng.uniform(0, TWO_PI, 20)
        tv = rng.uniform(-1.3, 1.3, 20)
        defects = reversibility_defect_many(ELLIPSE, tp, tv, fld, 100)
        assert np.max(defects) <= 1e-6


def test_circle_oracle_matches_stepper():
    rng = np.random.default_rng(43)
    for b_val in (0.1, 0.5, 1.0, 2.0):
        fld = FieldParams(b_val)
        for _ in range(100):
            z = PhasePoint(rng.uniform(0, TWO_PI), rng.uniform(-1.45, 1.45))
            z_oracle = circle_field_oracle(10.0, fld, z)
            z_step = billiard_step(CIRCLE, z, fld)
            assert wrapped_angle_gap(z_oracle.theta_pos, z_step.theta_pos) <= 1e-8
            assert abs(z_oracle.theta_vel - z_step.theta_vel) <= 1e-8


def test_circle_oracle_theta_vel_symmetry():
    rng = np.random.default_rng(44)
    for _ in range(200):
        z = PhasePoint(rng.uniform(0, TWO_PI), rng.uniform(-1.45, 1.45))
        out = circle_field_oracle(10.0, FieldParams(0.7), z)
        assert abs(out.theta_vel - z.theta_vel) <= 1e-12


def test_circle_oracle_mirror_symmetry():
    """x-axis mirror: (tp, tv, B) -> (-tp, -tv, -B) mirrors the output."""
    rng = np.random.default_rng(45)
    for _ in range(100):
        z = PhasePoint(rng.uniform(0, TWO_PI), rng.uniform(-1.45, 1.45))
        out = circle_field_oracle(10.0, FieldParams(0.8), z)
        z_m = PhasePoint((-z.theta_pos) % TWO_PI, -z.theta_vel)
        out_m = circle_field_oracle(10.0, FieldParams(-0.8), z_m)
        assert wrapped_angle_gap(out_m.theta_pos, (-out.theta_pos) % TWO_PI) <= 1e-9
        assert abs(out_m.theta_vel + out.theta_vel) <= 1e-9


def test_circle_oracle_degenerate_configurations():
    with pytest.raises(ValueError):
        circle_field_oracle(10.0, NO_FIELD, PhasePoint(0.0, 0.0))
    # internally tangent Larmor circle: the stepper's full-loop twin
    with pytest.raises(NoSecondIntersection):
        circle_field_oracle(10.0, FieldParams(2.0), PhasePoint(0.3, math.pi / 2 - 1e-9))


def test_reversibility_probe_failure_on_degenerate_orbit():
    """A full-loop fixed point never degenerates, so this must NOT raise."""
    z = PhasePoint(0.3, math.pi / 2 - 1e-9)
    d = reversibility_defect(CIRCLE, z, FieldParams(2.0), 5)
    assert d <= 1e-9
