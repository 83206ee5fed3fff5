"""Seeded ensemble and its phase portrait.

Runs a few hundred orbits on the ellipse at moderate field strength and
renders the portrait: each dot is one reflection, plotted as (boundary
angle, outgoing angle).  Invariant curves show up as one-dimensional
threads, chaotic orbits as scattered clouds.  The run is fully
deterministic: same seed, same bytes.
"""

import hashlib
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


def main():
    OUT.mkdir(exist_ok=True)
    cfg = EnsembleConfig(
        curve=BoundaryCurve(10.0, 8.0),
        field=FieldParams(0.5),
        number_of_orbits=300,
        points_per_orbit=400,
        master_seed=7,
    )
    records = run_ensemble(cfg)
    total = sum(len(r) for r in records)
    print(f"{len(records)} orbits, {total} phase points")

    style = PlotStyle()  # first six orbits highlighted in fixed colors
    path = render_phase_portrait(records, style, OUT / "phase_portrait.svg")
    print(f"wrote {path}")

    # determinism check: a second run of the same config is byte-identical
    records2 = run_ensemble(cfg)
    path2 = render_phase_portrait(records2, style, OUT / "phase_portrait_rerun.svg")
    h1 = hashlib.sha256(path.read_bytes()).hexdigest()
    h2 = hashlib.sha256(path2.read_bytes()).hexdigest()
    print(f"rerun identical: {h1 == h2}")
    path2.unlink()


if __name__ == "__main__":
    main()
