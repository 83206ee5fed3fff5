"""Follow one orbit bounce by bounce.

Starts a particle on the ellipse rim, steps the billiard map by hand to
show the phase coordinates evolving, then draws the table with the
reflection points and the Larmor arcs between them.
"""

from pathlib import Path

from magbilliards import (
    BoundaryCurve,
    EnsembleConfig,
    FieldParams,
    PhasePoint,
    PlotStyle,
    billiard_step,
    render_table_figure,
    run_orbit,
)

OUT = Path(__file__).parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    curve = BoundaryCurve(10.0, 8.0)
    field = FieldParams(0.5)  # Larmor radius 2

    z = PhasePoint(0.3, 0.4)
    print("step  theta_pos   theta_vel")
    for k in range(8):
        print(f"{k:4d}  {z.theta_pos:9.6f}  {z.theta_vel:+9.6f}")
        z = billiard_step(curve, z, field)

    # same orbit through the ensemble runner, then a figure
    cfg = EnsembleConfig(curve=curve, field=field, number_of_orbits=1,
                         points_per_orbit=60, master_seed=0)
    record = run_orbit(cfg, initial=PhasePoint(0.3, 0.4))
    print(f"orbit of {len(record)} points, flags: {sorted(record.flags) or 'none'}")

    style = PlotStyle(highlighted_orbit_ids=(0,), points_on_table=60,
                      overlay_paths=True)
    path = render_table_figure(curve, [record], style, OUT / "single_orbit.svg",
                               field=field)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
