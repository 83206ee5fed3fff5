"""The billiard map: phase/Euclidean conversions, reflection, next-hit solvers.

Phase coordinates are (theta_pos, theta_vel): the polar angle of the
reflection point on the boundary and the outgoing direction measured from
the inward normal, positive toward the counterclockwise tangent.  Between
reflections the particle follows a straight chord (no field) or a Larmor
arc of radius 1/|B| (field strength B; B > 0 turns counterclockwise).

All per-step arithmetic funnels through one vectorized kernel
(`step_many`); the scalar operations wrap a batch of size one, so a scalar
step and the corresponding lane of a batched step agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .boundary import TWO_PI, BoundaryCurve
from .errors import DegenerateTangency, RootFindFailure, VelocityOutOfRange

__all__ = [
    "PhasePoint",
    "BoundaryState",
    "FieldParams",
    "ArcHit",
    "StepBatch",
    "phase_states",
    "phase_to_state",
    "state_to_phase",
    "reflect",
    "next_hit_line",
    "next_hit_arc",
    "billiard_step",
    "step_many",
]

HALF_PI = 0.5 * math.pi

# arrival angles closer than this to +-pi/2 are treated as tangential
TANGENCY_MARGIN = 1e-12


@dataclass(frozen=True)
class PhasePoint:
    """One point of the discrete dynamics.

    theta_pos is normalized into [0, 2*pi); |theta_vel| must stay strictly
    below pi/2 (the outgoing velocity points into the table).
    """

    theta_pos: float
    theta_vel: float

    def __post_init__(self):
        object.__setattr__(self, "theta_pos", float(np.mod(self.theta_pos, TWO_PI)))
        object.__setattr__(self, "theta_vel", float(self.theta_vel))
        if not abs(self.theta_vel) < HALF_PI:
            raise ValueError(f"theta_vel={self.theta_vel} outside (-pi/2, pi/2)")


@dataclass(frozen=True)
class BoundaryState:
    """Euclidean form of a phase point: boundary position plus outgoing unit velocity."""

    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))


@dataclass(frozen=True)
class FieldParams:
    """Uniform transverse magnetic field of signed strength B.

    The particle speed is normalized so the Larmor radius is 1/|B|;
    B > 0 turns the trajectory counterclockwise, B < 0 clockwise.
    """

    field_strength: float = 0.0

    @property
    def larmor_radius(self) -> float:
        if self.field_strength == 0.0:
            return math.inf
        return 1.0 / abs(self.field_strength)

    @property
    def orientation(self) -> int:
        return -1 if self.field_strength < 0.0 else 1


NO_FIELD = FieldParams(0.0)


class ArcHit(NamedTuple):
    point: np.ndarray
    velocity: np.ndarray
    full_loop: bool


class StepBatch(NamedTuple):
    """Result of advancing a batch of phase points by one reflection.

    ``hit_x``/``hit_y`` are the raw root-finder intersection points (before
    snapping to the polar parametrization) and ``residual`` the |F| value
    there.  Lanes whose Larmor circle never leaves the table are flagged
    ``full_loop`` and returned unchanged; lanes arriving tangentially are
    flagged ``degenerate``.
    """

    theta_pos: np.ndarray
    theta_vel: np.ndarray
    hit_x: np.ndarray
    hit_y: np.ndarray
    residual: np.ndarray
    full_loop: np.ndarray
    degenerate: np.ndarray


# -- phase <-> Euclidean ----------------------------------------------


def _frames(curve: BoundaryCurve, theta_pos, theta_vel):
    """Positions, outgoing velocities, and outward normals for phase arrays."""
    r = curve.radius_at(theta_pos)
    px = r * np.cos(theta_pos)
    py = r * np.sin(theta_pos)
    g = curve.gradient(px, py)
    gnorm = np.hypot(g[..., 0], g[..., 1])
    nx = g[..., 0] / gnorm
    ny = g[..., 1] / gnorm
    cv = np.cos(theta_vel)
    sv = np.sin(theta_vel)
    vx = -cv * nx - sv * ny
    vy = -cv * ny + sv * nx
    return px, py, vx, vy, nx, ny


def phase_states(curve: BoundaryCurve, theta_pos, theta_vel):
    """Vectorized phase-to-Euclidean conversion.

    Returns (positions, velocities), each with the two components on the
    last axis.
    """
    tp = np.asarray(theta_pos, dtype=float)
    tv = np.asarray(theta_vel, dtype=float)
    px, py, vx, vy, _, _ = _frames(curve, tp, tv)
    return np.stack((px, py), axis=-1), np.stack((vx, vy), axis=-1)


def phase_to_state(curve: BoundaryCurve, z: PhasePoint) -> BoundaryState:
    """Euclidean boundary state of a phase point."""
    pos, vel = phase_states(curve, z.theta_pos, z.theta_vel)
    return BoundaryState(position=pos, velocity=vel)


def state_to_phase(curve: BoundaryCurve, s: BoundaryState) -> PhasePoint:
    """Inverse of phase_to_state; requires an inward-pointing velocity."""
    x, y = s.position
    n = curve.outward_normal(x, y)
    v = s.velocity
    v_n = v[0] * n[0] + v[1] * n[1]
    if v_n >= 0.0:
        raise VelocityOutOfRange(f"velocity has outward normal component {v_n:.3e}")
    v_t = -v[0] * n[1] + v[1] * n[0]
    return PhasePoint(
        theta_pos=float(curve.polar_angle_of(x, y)),
        theta_vel=math.atan2(v_t, -v_n),
    )


def reflect(v_in: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Specular reflection: keep the tangential component, flip the normal one.

    Accepts single vectors or stacks of shape (..., 2).
    """
    v_in = np.asarray(v_in, dtype=float)
    n = np.asarray(n, dtype=float)
    v_dot_n = np.sum(v_in * n, axis=-1, keepdims=True)
    return v_in - 2.0 * v_dot_n * n


# -- first-intersection solvers ---------------------------------------

# marching resolution: characteristic length / 2^6, per the flowchart recipe
_MARCH_CELLS = 64
_BRACKET_SHRINK = 1e-12
_NEWTON_ITERS = 5
_EXCLUSION = 1e-6


def _line_char_length(curve: BoundaryCurve) -> float:
    return min(curve.perimeter(), 4.0 * max(curve.semi_axis_a, curve.semi_axis_b))


def _refine_crossing(F, lo, hi, t_char):
    """Bisect a sign-changing bracket to 1e-12 * t_char, then polish with Newton.

    ``F`` maps a parameter array to (g, gprime) along the trajectory.
    """
    n_bis = max(1, math.ceil(math.log2(1.0 / (_MARCH_CELLS * _BRACKET_SHRINK))))
    for _ in range(n_bis):
        mid = 0.5 * (lo + hi)
        gm, _ = F(mid)
        inside = gm < 0.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    t = 0.5 * (lo + hi)
    for _ in range(_NEWTON_ITERS):
        g, gp = F(t)
        transversal = np.abs(gp) > 1e-30
        t = t - np.where(transversal, g, 0.0) / np.where(transversal, gp, 1.0)
    return t


def _first_hit_line(curve: BoundaryCurve, px, py, vx, vy, tol):
    """First boundary crossing along straight rays from inward boundary states."""
    t_char = _line_char_length(curve)
    t_excl = _EXCLUSION * t_char
    h0 = t_char / _MARCH_CELLS
    ts = t_excl + h0 * np.arange(_MARCH_CELLS + 1)

    g_grid = curve.implicit_value(
        px[np.newaxis, :] + ts[:, np.newaxis] * vx[np.newaxis, :],
        py[np.newaxis, :] + ts[:, np.newaxis] * vy[np.newaxis, :],
    )
    crossing = (g_grid[:-1] < 0.0) & (g_grid[1:] >= 0.0)
    found = crossing.any(axis=0)
    if not found.all():
        raise RootFindFailure(
            f"{int((~found).sum())} ray(s) found no boundary crossing within the search horizon"
        )
    first = crossing.argmax(axis=0)

    def F(t):
        qx = px + t * vx
        qy = py + t * vy
        g = curve.implicit_value(qx, qy)
        grad = curve.gradient(qx, qy)
        return g, grad[..., 0] * vx + grad[..., 1] * vy

    t_star = _refine_crossing(F, ts[first], ts[first + 1], t_char)
    qx = px + t_star * vx
    qy = py + t_star * vy
    residual = np.abs(curve.implicit_value(qx, qy))
    if np.any(residual > tol):
        raise RootFindFailure(
            f"line hit residual {residual.max():.3e} exceeds tolerance {tol:.1e}"
        )
    return qx, qy, residual


def _first_hit_arc(curve: BoundaryCurve, px, py, vx, vy, radius, sigma, tol):
    """First boundary crossing along Larmor arcs.

    The arc is parametrized by arc length t; the swept angle is
    sigma * t / radius around the center 90 degrees to the side of the
    velocity given by the turning sense.  Any arc that stays inside a
    convex table is shorter than pi * diam, which caps the march horizon
    when the Larmor circumference is large.
    """
    cx = px - sigma * radius * vy
    cy = py + sigma * radius * vx
    alpha0 = np.arctan2(py - cy, px - cx)

    circumference = TWO_PI * radius
    t_char = min(curve.perimeter(), circumference)
    t_excl = _EXCLUSION * t_char
    h0 = t_char / _MARCH_CELLS
    diam = 2.0 * math.hypot(curve.semi_axis_a, curve.semi_axis_b)
    t_hi = min(circumference - t_excl, math.pi * diam)
    covers_full_circle = (circumference - t_excl) <= math.pi * diam

    n_cells = max(1, math.ceil((t_hi - t_excl) / h0))
    ts = t_excl + h0 * np.arange(n_cells + 1)
    ts[-1] = t_hi

    ang = alpha0[np.newaxis, :] + (sigma / radius) * ts[:, np.newaxis]
    g_grid = curve.implicit_value(cx + radius * np.cos(ang), cy + radius * np.sin(ang))
    crossing = (g_grid[:-1] < 0.0) & (g_grid[1:] >= 0.0)
    found = crossing.any(axis=0)
    full_loop = ~found
    if full_loop.any() and not covers_full_circle:
        raise RootFindFailure(
            f"{int(full_loop.sum())} arc(s) found no crossing within pi*diam of arc length"
        )

    n = px.shape[0]
    qx = px.copy()
    qy = py.copy()
    ux = vx.copy()
    uy = vy.copy()
    residual = np.zeros(n)

    work = np.flatnonzero(found)
    if work.size:
        w_first = crossing.argmax(axis=0)[work]
        w_c_x = cx[work]
        w_c_y = cy[work]
        w_a0 = alpha0[work]

        def F(t):
            a = w_a0 + (sigma / radius) * t
            ca = np.cos(a)
            sa = np.sin(a)
            x = w_c_x + radius * ca
            y = w_c_y + radius * sa
            g = curve.implicit_value(x, y)
            grad = curve.gradient(x, y)
            return g, sigma * (-grad[..., 0] * sa + grad[..., 1] * ca)

        t_star = _refine_crossing(F, ts[w_first], ts[w_first + 1], t_char)
        a_star = w_a0 + (sigma / radius) * t_star
        ca = np.cos(a_star)
        sa = np.sin(a_star)
        qx[work] = w_c_x + radius * ca
        qy[work] = w_c_y + radius * sa
        ux[work] = -sigma * sa
        uy[work] = sigma * ca
        residual[work] = np.abs(curve.implicit_value(qx[work], qy[work]))
        if np.any(residual[work] > tol):
            raise RootFindFailure(
                f"arc hit residual {residual[work].max():.3e} exceeds tolerance {tol:.1e}"
            )
    return qx, qy, ux, uy, full_loop, residual


# -- the billiard map -------------------------------------------------


def step_many(
    curve: BoundaryCurve,
    theta_pos,
    theta_vel,
    field: FieldParams = NO_FIELD,
    tol: float = 1e-9,
) -> StepBatch:
    """Advance a batch of phase points by one reflection.

    Propagates every lane along its chord or Larmor arc to the first
    boundary crossing (|F| <= tol there), reflects the arrival velocity,
    and converts back to phase coordinates.  Lanes are independent: a
    lane's result does not depend on the rest of the batch.
    """
    tp = np.atleast_1d(np.asarray(theta_pos, dtype=float))
    tv = np.atleast_1d(np.asarray(theta_vel, dtype=float))
    px, py, vx, vy, _, _ = _frames(curve, tp, tv)

    if field.field_strength == 0.0:
        qx, qy, residual = _first_hit_line(curve, px, py, vx, vy, tol)
        ux, uy = vx, vy
        full_loop = np.zeros(tp.shape, dtype=bool)
    else:
        qx, qy, ux, uy, full_loop, residual = _first_hit_arc(
            curve, px, py, vx, vy, field.larmor_radius, float(field.orientation), tol
        )

    grad = curve.gradient(qx, qy)
    gnorm = np.hypot(grad[..., 0], grad[..., 1])
    nx = grad[..., 0] / gnorm
    ny = grad[..., 1] / gnorm
    u_dot_n = ux * nx + uy * ny
    rx = ux - 2.0 * u_dot_n * nx
    ry = uy - 2.0 * u_dot_n * ny

    out_tp = np.mod(np.arctan2(qy, qx), TWO_PI)
    out_tv = np.arctan2(-rx * ny + ry * nx, -(rx * nx + ry * ny))

    if full_loop.any():
        out_tp = np.where(full_loop, tp, out_tp)
        out_tv = np.where(full_loop, tv, out_tv)

    degenerate = ~full_loop & (np.abs(out_tv) >= HALF_PI - TANGENCY_MARGIN)
    return StepBatch(out_tp, out_tv, qx, qy, residual, full_loop, degenerate)


def next_hit_line(curve: BoundaryCurve, s: BoundaryState, tol: float = 1e-9) -> np.ndarray:
    """First boundary point hit by the straight ray from an inward state."""
    px, py = s.position
    vx, vy = s.velocity
    qx, qy, _ = _first_hit_line(
        curve, np.array([px]), np.array([py]), np.array([vx]), np.array([vy]), tol
    )
    return np.array([qx[0], qy[0]])


def next_hit_arc(
    curve: BoundaryCurve, s: BoundaryState, field: FieldParams, tol: float = 1e-9
) -> ArcHit:
    """First boundary crossing of the Larmor arc from an inward state.

    If the whole Larmor circle stays inside the table the start state is
    returned unchanged with ``full_loop`` set.
    """
    if field.field_strength == 0.0:
        raise ValueError("next_hit_arc requires a nonzero field; use next_hit_line")
    px, py = s.position
    vx, vy = s.velocity
    qx, qy, ux, uy, full_loop, _ = _first_hit_arc(
        curve,
        np.array([px]),
        np.array([py]),
        np.array([vx]),
        np.array([vy]),
        field.larmor_radius,
        float(field.orientation),
        tol,
    )
    return ArcHit(
        point=np.array([qx[0], qy[0]]),
        velocity=np.array([ux[0], uy[0]]),
        full_loop=bool(full_loop[0]),
    )


def billiard_step(
    curve: BoundaryCurve,
    z: PhasePoint,
    field: FieldParams = NO_FIELD,
    tol: float = 1e-9,
) -> PhasePoint:
    """One application of the billiard map to a single phase point."""
    batch = step_many(curve, z.theta_pos, z.theta_vel, field, tol)
    if batch.degenerate[0]:
        raise DegenerateTangency(
            f"arrival angle {batch.theta_vel[0]:.12f} is tangential within {TANGENCY_MARGIN:.0e}"
        )
    return PhasePoint(theta_pos=float(batch.theta_pos[0]), theta_vel=float(batch.theta_vel[0]))
