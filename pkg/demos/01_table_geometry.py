"""Tour of the superellipse table geometry.

Builds a few tables |x/a|^p + |y/b|^p = 1, queries the implicit value,
normals, tangents, and arc length, and draws the outlines side by side
so the effect of the exponent p is visible: p=2 is the ellipse, larger
p pushes the curve toward a rounded rectangle.
"""

from pathlib import Path

import numpy as np

from magbilliards import BoundaryCurve
from magbilliards.svgfig import SvgCanvas

OUT = Path(__file__).parent / "output"


def describe(curve):
    print(f"table a={curve.semi_axis_a} b={curve.semi_axis_b} p={curve.power_p}")
    x, y = curve.point_at_polar(0.7)
    print(f"  point at theta=0.7: ({x:.6f}, {y:.6f})")
    print(f"  implicit value there: {curve.implicit_value(x, y):.2e} (0 means on the curve)")
    n = curve.outward_normal(x, y)
    t = curve.tangent_ccw(x, y)
    print(f"  outward normal {n.round(6)}, ccw tangent {t.round(6)}, n.t = {float(n @ t):.1e}")
    print(f"  quarter arc length: {curve.arc_length_between(0.0, np.pi / 2):.6f}")
    print(f"  perimeter: {curve.perimeter():.6f}")


def draw_outlines(curves, path):
    size = 460
    canvas = SvgCanvas(size, size)
    canvas.desc("superellipse outlines for several exponents")
    canvas.rect(0, 0, size, size, fill="#ffffff")
    scale = (size / 2 - 20) / 10.0
    colors = ["#0072b2", "#d55e00", "#009e73"]
    theta = np.linspace(0.0, 2.0 * np.pi, 1025)
    for curve, color in zip(curves, colors):
        xy = curve.point_at_polar(theta)
        pts = np.column_stack([size / 2 + scale * xy[:, 0], size / 2 - scale * xy[:, 1]])
        canvas.polyline(pts, stroke=color, stroke_width=1.5)
        canvas.text(size / 2 + scale * curve.semi_axis_a - 40,
                    size / 2 - 10 * curve.power_p,
                    f"p={curve.power_p:g}", size=12, fill=color)
    canvas.write(path)
    print(f"wrote {path}")


def main():
    OUT.mkdir(exist_ok=True)
    curves = [
        BoundaryCurve(10.0, 8.0),
        BoundaryCurve(10.0, 8.0, 2.5),
        BoundaryCurve(10.0, 8.0, 4.0),
    ]
    for curve in curves:
        describe(curve)
    draw_outlines(curves, OUT / "table_shapes.svg")

    # the polar parametrization round-trips through (x, y)
    curve = curves[0]
    theta = 2.2
    print(f"polar round trip: {curve.polar_angle_of(*curve.point_at_polar(theta)):.12f}"
          f" vs {theta}")


if __name__ == "__main__":
    main()
