"""Dynamical diagnostics and independent oracles.

Contains the conserved quantity of the non-magnetic ellipse, a
finite-difference check of area preservation in (arc length, angle)
coordinates, a time-reversal round-trip probe, and a closed-form
next-reflection oracle for the circular table in a field.  The oracle is
purely algebraic (two-circle radical-line intersection) and never calls
the iterative hit solver, so it can cross-validate it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import TWO_PI, BoundaryCurve
from .errors import NoSecondIntersection, ProbeFailure
from .stepper import HALF_PI, FieldParams, BoundaryState, PhasePoint, phase_states, step_many

__all__ = [
    "joachimsthal",
    "joachimsthal_values",
    "SymplecticProbe",
    "symplectic_defect",
    "probe_symplectic",
    "reversibility_defect",
    "reversibility_defect_many",
    "circle_field_oracle",
    "theta_at_arc_length",
]


# -- Joachimsthal invariant (integrable non-magnetic ellipse) ----------


def joachimsthal(curve: BoundaryCurve, state: BoundaryState) -> float:
    """Conserved quantity <A x, v> of the field-free ellipse billiard.

    A = diag(1/a^2, 1/b^2), evaluated with the outgoing velocity.  Only
    meaningful as an invariant for power_p = 2 and zero field; computed
    regardless.
    """
    x, y = state.position
    vx, vy = state.velocity
    return x * vx / curve.semi_axis_a**2 + y * vy / curve.semi_axis_b**2


def joachimsthal_values(curve: BoundaryCurve, theta_pos, theta_vel) -> np.ndarray:
    """Vectorized Joachimsthal values along arrays of phase points."""
    pos, vel = phase_states(curve, theta_pos, theta_vel)
    return (
        pos[..., 0] * vel[..., 0] / curve.semi_axis_a**2
        + pos[..., 1] * vel[..., 1] / curve.semi_axis_b**2
    )


# -- arc-length coordinate --------------------------------------------


def theta_at_arc_length(curve: BoundaryCurve, s: float) -> float:
    """Polar angle at counterclockwise arc length s from polar angle 0.

    Newton iteration on the monotone map theta -> arc_length(0, theta).
    """
    theta = TWO_PI * s / curve.perimeter()
    for _ in range(60):
        f = curve.arc_length_between(0.0, theta) - s
        step = f / curve._speed_scalar(theta)
        theta -= step
        if abs(step) < 1e-14:
            return theta
    raise ProbeFailure(f"arc-length inversion stalled at s={s}")


# -- symplectic-form preservation -------------------------------------


@dataclass(frozen=True)
class SymplecticProbe:
    """Finite-difference area-preservation probe at one phase point."""

    base_point: PhasePoint
    fd_step: float
    defect: float


def symplectic_defect(
    curve: BoundaryCurve,
    z: PhasePoint,
    field: FieldParams = FieldParams(0.0),
    fd_step: float = 1e-5,
) -> float:
    """|det(J) * cos(phi') / cos(phi) - 1| of the map in (s, phi) coordinates.

    J is the central finite-difference Jacobian with step ``fd_step`` in
    both the arc-length coordinate s (measured counterclockwise from polar
    angle 0) and the direction angle phi = theta_vel.  The map preserves
    cos(phi) dphi ^ ds, so the returned defect vanishes up to
    finite-difference truncation and solver noise.
    """
    h = fd_step
    if h <= 0.0:
        raise ValueError("fd_step must be positive")
    if abs(z.theta_vel) + h >= HALF_PI:
        raise ProbeFailure("phi neighbors leave the admissible angular range")

    per = curve.perimeter()
    s0 = curve.arc_length_between(0.0, z.theta_pos)
    try:
        th_sp = theta_at_arc_length(curve, s0 + h)
        th_sm = theta_at_arc_length(curve, s0 - h)
        tp = np.array([th_sp, th_sm, z.theta_pos, z.theta_pos, z.theta_pos])
        tv = np.array([z.theta_vel, z.theta_vel, z.theta_vel + h, z.theta_vel - h, z.theta_vel])
        out = step_many(curve, tp, tv, field)
    except Exception as exc:  # stepping of any neighbor failed
        raise ProbeFailure(f"neighbor step failed: {exc}") from exc
    if out.degenerate.any() or out.full_loop.any():
        raise ProbeFailure("degenerate or full-loop neighbor in finite-difference stencil")

    s_img = np.array([curve.arc_length_between(0.0, t) for t in out.theta_pos[:4]])

    def ds(i, j):
        d = s_img[i] - s_img[j]
        return d - per * round(d / per)

    j11 = ds(0, 1) / (2.0 * h)
    j21 = (out.theta_vel[0] - out.theta_vel[1]) / (2.0 * h)
    j12 = ds(2, 3) / (2.0 * h)
    j22 = (out.theta_vel[2] - out.theta_vel[3]) / (2.0 * h)
    det = j11 * j22 - j12 * j21
    return abs(det * math.cos(out.theta_vel[4]) / math.cos(z.theta_vel) - 1.0)


def probe_symplectic(
    curve: BoundaryCurve,
    z: PhasePoint,
    field: FieldParams = FieldParams(0.0),
    fd_step: float = 1e-5,
) -> SymplecticProbe:
    """symplectic_defect packaged with its inputs."""
    return SymplecticProbe(base_point=z, fd_step=fd_step, defect=symplectic_defect(curve, z, field, fd_step))


# -- time reversal ----------------------------------------------------


def reversibility_defect_many(
    curve: BoundaryCurve,
    theta_pos,
    theta_vel,
    field: FieldParams = FieldParams(0.0),
    n_steps: int = 100,
    tol: float = 1e-9,
) -> np.ndarray:
    """Round-trip error of forward/backward iteration for arrays of starts.

    Steps forward n_steps, negates theta_vel and the field sign, steps
    n_steps again, negates theta_vel once more, and returns per lane the
    larger of the wrapped theta_pos error and the theta_vel error against
    the start.
    """
    tp = np.atleast_1d(np.asarray(theta_pos, dtype=float))
    tv = np.atleast_1d(np.asarray(theta_vel, dtype=float))
    cur_tp, cur_tv = tp.copy(), tv.copy()
    reversed_field = FieldParams(-field.field_strength)
    for leg_field in (field, reversed_field):
        for _ in range(n_steps):
            out = step_many(curve, cur_tp, cur_tv, leg_field, tol)
            if out.degenerate.any():
                raise ProbeFailure("degenerate step during reversibility probe")
            cur_tp, cur_tv = out.theta_pos, out.theta_vel
        cur_tv = -cur_tv
    d_pos = cur_tp - tp
    d_pos -= TWO_PI * np.round(d_pos / TWO_PI)
    return np.maximum(np.abs(d_pos), np.abs(cur_tv - tv))


def reversibility_defect(
    curve: BoundaryCurve,
    z: PhasePoint,
    field: FieldParams = FieldParams(0.0),
    n_steps: int = 100,
    tol: float = 1e-9,
) -> float:
    """Round-trip error for a single start."""
    return float(reversibility_defect_many(curve, z.theta_pos, z.theta_vel, field, n_steps, tol)[0])


# -- closed-form circle-table oracle ----------------------------------

# angular advance below this is the start point reappearing, not a new hit
_START_EXCLUSION_ANGLE = 1e-7


def circle_field_oracle(table_radius: float, field: FieldParams, z: PhasePoint) -> PhasePoint:
    """Next phase point on a circular table in a field, purely algebraically.

    Builds the Larmor circle, intersects it with the table circle by the
    radical-line construction, picks the first intersection reached in the
    turning sense, and reflects there.  Independent of the marching root
    finder by design.
    """
    if field.field_strength == 0.0:
        raise ValueError("oracle requires a nonzero field")
    big_r = float(table_radius)
    r = field.larmor_radius
    sigma = float(field.orientation)

    ct, st = math.cos(z.theta_pos), math.sin(z.theta_pos)
    px, py = big_r * ct, big_r * st
    # outward normal is radial; velocity from (theta_vel measured off -n toward ccw tangent)
    cv, sv = math.cos(z.theta_vel), math.sin(z.theta_vel)
    vx = -cv * ct - sv * st
    vy = -cv * st + sv * ct
    cx = px - sigma * r * vy
    cy = py + sigma * r * vx

    d = math.hypot(cx, cy)
    if d < 1e-12:
        raise NoSecondIntersection("Larmor circle concentric with the table")
    along = (big_r**2 - r**2 + d**2) / (2.0 * d)
    h_sq = big_r**2 - along**2
    if h_sq <= 0.0:
        raise NoSecondIntersection("Larmor circle does not cross the table circle twice")
    h = math.sqrt(h_sq)
    ex, ey = cx / d, cy / d
    mx, my = along * ex, along * ey
    candidates = ((mx - h * ey, my + h * ex), (mx + h * ey, my - h * ex))

    alpha0 = math.atan2(py - cy, px - cx)
    best = None
    best_adv = math.inf
    for qx, qy in candidates:
        adv = math.remainder(sigma * (math.atan2(qy - cy, qx - cx) - alpha0), TWO_PI) % TWO_PI
        if adv > _START_EXCLUSION_ANGLE and adv < best_adv:
            best, best_adv = (qx, qy), adv
    if best is None:
        raise NoSecondIntersection("both intersections coincide with the start point")
    qx, qy = best

    wx, wy = (qx - cx) / r, (qy - cy) / r
    wn = math.hypot(wx, wy)
    wx, wy = wx / wn, wy / wn
    ux, uy = -sigma * wy, sigma * wx

    qn = math.hypot(qx, qy)
    nx, ny = qx / qn, qy / qn
    u_dot_n = ux * nx + uy * ny
    rx = ux - 2.0 * u_dot_n * nx
    ry = uy - 2.0 * u_dot_n * ny
    try:
        return PhasePoint(
            theta_pos=math.atan2(qy, qx) % TWO_PI,
            theta_vel=math.atan2(-rx * ny + ry * nx, -(rx * nx + ry * ny)),
        )
    except ValueError as exc:
        # arrival angle rounded onto +-pi/2: the two intersections have
        # merged with the start point to float resolution
        raise NoSecondIntersection("grazing arrival at the tangency limit") from exc
