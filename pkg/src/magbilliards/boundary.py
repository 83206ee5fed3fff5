"""Geometry of superellipse tables.

The table boundary is the Lame curve

    |x / a|^p + |y / b|^p = 1,

strictly convex for p > 1, an ellipse for p = 2.  All point-wise methods
accept scalars or numpy arrays and broadcast; vector-valued results carry
the components on the last axis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import QuadratureFailure, ZeroGradient

__all__ = ["BoundaryCurve", "perimeter"]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BoundaryCurve:
    """Superellipse boundary with semi-axes ``a``, ``b`` and exponent ``p``.

    ``power_p`` must exceed 1 (strict convexity).  Values in (1, 2) give a
    boundary that is not twice differentiable on the axes; such curves are
    accepted but flagged via ``smoothness_warning``.
    """

    semi_axis_a: float
    semi_axis_b: float
    power_p: float = 2.0
    smoothness_warning: bool = field(init=False, default=False, compare=False)

    def __post_init__(self):
        if not (self.semi_axis_a > 0.0 and self.semi_axis_b > 0.0):
            raise ValueError("semi-axes must be positive")
        if not self.power_p > 1.0:
            raise ValueError("power_p must exceed 1 for a strictly convex table")
        if self.power_p < 2.0:
            object.__setattr__(self, "smoothness_warning", True)
            warnings.warn(
                f"power_p={self.power_p} is below 2: boundary is only C^1 on the axes",
                stacklevel=2,
            )

    # -- implicit form ------------------------------------------------

    def implicit_value(self, x, y):
        """F(x, y) = |x/a|^p + |y/b|^p - 1: negative inside, zero on the curve."""
        p = self.power_p
        return (
            np.abs(x / self.semi_axis_a) ** p
            + np.abs(y / self.semi_axis_b) ** p
            - 1.0
        )

    def gradient(self, x, y):
        """Gradient (dF/dx, dF/dy), components stacked on the last axis.

        The axis values x = 0 / y = 0 are exact zeros of the respective
        component for p > 1 (|t|^(p-1) -> 0), so no sign hazard arises.
        """
        p = self.power_p
        a = self.semi_axis_a
        b = self.semi_axis_b
        gx = (p / a) * np.abs(x / a) ** (p - 1.0) * np.sign(x)
        gy = (p / b) * np.abs(y / b) ** (p - 1.0) * np.sign(y)
        return np.stack(np.broadcast_arrays(gx, gy), axis=-1)

    def contains(self, x, y, *, tol: float = 0.0):
        """True for points strictly inside the table (F < -tol)."""
        return self.implicit_value(x, y) < -tol

    def outward_normal(self, x, y):
        """Unit outward normal grad F / |grad F| at a point on the curve."""
        g = self.gradient(x, y)
        norm = np.linalg.norm(g, axis=-1)
        if np.any(norm < 1e-14):
            raise ZeroGradient("vanishing boundary gradient; point is not on the curve")
        return g / norm[..., np.newaxis]

    def tangent_ccw(self, x, y):
        """Unit tangent, the outward normal rotated by +pi/2.

        Traversing the boundary along this direction keeps the interior on
        the left (counterclockwise).
        """
        n = self.outward_normal(x, y)
        t = np.empty_like(n)
        t[..., 0] = -n[..., 1]
        t[..., 1] = n[..., 0]
        return t

    # -- polar parametrization ----------------------------------------

    def radius_at(self, theta):
        """Radial distance r(theta) of the boundary from the origin."""
        p = self.power_p
        u = (
            np.abs(np.cos(theta) / self.semi_axis_a) ** p
            + np.abs(np.sin(theta) / self.semi_axis_b) ** p
        )
        return u ** (-1.0 / p)

    def point_at_polar(self, theta):
        """Boundary point r(theta) * (cos theta, sin theta)."""
        r = self.radius_at(theta)
        return np.stack(np.broadcast_arrays(r * np.cos(theta), r * np.sin(theta)), axis=-1)

    def polar_angle_of(self, x, y):
        """Polar angle of a boundary point, normalized to [0, 2*pi)."""
        return np.mod(np.arctan2(y, x), TWO_PI)

    def boundary_speed(self, theta):
        """|d Sigma / d theta| of the polar parametrization."""
        r, dr = self._radius_and_derivative(theta)
        return np.hypot(dr, r)

    def _radius_and_derivative(self, theta):
        p = self.power_p
        a = self.semi_axis_a
        b = self.semi_axis_b
        c = np.cos(theta)
        s = np.sin(theta)
        ca = np.abs(c) / a
        sb = np.abs(s) / b
        u = ca**p + sb**p
        du = p * ca ** (p - 1.0) * np.sign(c) * (-s / a) + p * sb ** (p - 1.0) * np.sign(s) * (c / b)
        r = u ** (-1.0 / p)
        dr = (-1.0 / p) * u ** (-1.0 / p - 1.0) * du
        return r, dr

    def _speed_scalar(self, theta: float) -> float:
        # math-module twin of boundary_speed, for tight quadrature loops
        p = self.power_p
        a = self.semi_axis_a
        b = self.semi_axis_b
        c = math.cos(theta)
        s = math.sin(theta)
        ca = abs(c) / a
        sb = abs(s) / b
        u = ca**p + sb**p
        sc = 1.0 if c > 0.0 else (-1.0 if c < 0.0 else 0.0)
        ss = 1.0 if s > 0.0 else (-1.0 if s < 0.0 else 0.0)
        du = p * ca ** (p - 1.0) * sc * (-s / a) + p * sb ** (p - 1.0) * ss * (c / b)
        r = u ** (-1.0 / p)
        dr = (-1.0 / p) * u ** (-1.0 / p - 1.0) * du
        return math.hypot(dr, r)

    # -- arc length ---------------------------------------------------

    def arc_length_between(self, theta_0: float, theta_1: float) -> float:
        """Signed counterclockwise arc length from theta_0 to theta_1.

        Adaptive Simpson quadrature of the boundary speed, absolute
        tolerance 1e-10.  Negative when theta_1 < theta_0.
        """
        if theta_1 == theta_0:
            return 0.0
        return _adaptive_simpson(self._speed_scalar, theta_0, theta_1, 1e-10, _MAX_DEPTH)

    def perimeter(self) -> float:
        """Total boundary length (cached)."""
        return perimeter(self)


@lru_cache(maxsize=128)
def perimeter(curve: BoundaryCurve) -> float:
    """Total length of the boundary of ``curve``."""
    return curve.arc_length_between(0.0, TWO_PI)


_MAX_DEPTH = 40


def _adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int) -> float:
    fa = f(a)
    fb = f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, max_depth)


def _simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    if depth <= 0:
        raise QuadratureFailure(
            f"adaptive Simpson depth cap reached on [{a}, {b}]; residual {abs(err) / 15.0:.3e}"
        )
    half = 0.5 * tol
    return _simpson_recurse(f, a, fa, m, fm, lm, flm, left, half, depth - 1) + _simpson_recurse(
        f, m, fm, b, fb, rm, frm, right, half, depth - 1
    )
