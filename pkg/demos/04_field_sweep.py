"""Phase portraits across field strengths.

Sweeps B over the values used throughout the package presets and writes
one portrait per value.  Watch the portrait reorganize: at B=0 the
ellipse is integrable (everything lies on invariant curves), weak fields
deform those curves, strong fields create skipping-orbit bands near
theta_vel = +/- pi/2.
"""

from pathlib import Path

from magbilliards import (
    BoundaryCurve,
    EnsembleConfig,
    FieldParams,
    PlotStyle,
    render_phase_portrait,
    run_ensemble,
)

OUT = Path(__file__).parent / "output"

FIELDS = [0.0, 0.01, 0.5, 1.0, 2.0]


def main():
    OUT.mkdir(exist_ok=True)
    curve = BoundaryCurve(10.0, 8.0)
    style = PlotStyle()
    for b_field in FIELDS:
        cfg = EnsembleConfig(
            curve=curve,
            field=FieldParams(b_field),
            number_of_orbits=200,
            points_per_orbit=300,
            master_seed=11,
        )
        records = run_ensemble(cfg)
        name = f"portrait_B{b_field:g}".replace(".", "_") + ".svg"
        path = render_phase_portrait(records, style, OUT / name)
        early = sum("terminated_early" in r.flags for r in records)
        note = f" ({early} orbits stopped early)" if early else ""
        print(f"B={b_field:<5g} -> {path.name}{note}")


if __name__ == "__main__":
    main()
