"""Magnetic billiards in strictly convex superellipse tables.

Deterministic simulation of a point charge bouncing inside the curve
|x/a|^p + |y/b|^p = 1: straight chords without a field, Larmor arcs of
radius 1/|B| with one, specular reflection at the wall.  The package
builds seeded orbit ensembles, renders phase portraits and real-space
table figures, and checks the dynamics against closed forms and
conservation laws.
"""

__version__ = "0.1.0"

from .boundary import BoundaryCurve, perimeter
from .errors import (
    DegenerateTangency,
    InvalidGeometry,
    MagneticBilliardsError,
    NoSecondIntersection,
    ProbeFailure,
    QuadratureFailure,
    RootFindFailure,
    VelocityOutOfRange,
    ZeroGradient,
)
from .stepper import (
    NO_FIELD,
    BoundaryState,
    FieldParams,
    PhasePoint,
    StepBatch,
    billiard_step,
    next_hit_arc,
    next_hit_line,
    phase_to_state,
    reflect,
    state_to_phase,
    step_many,
)
from .ensemble import (
    EnsembleConfig,
    OrbitRecord,
    mix_seed,
    run_ensemble,
    run_orbit,
    sample_initial,
)
from .analysis import (
    SymplecticProbe,
    circle_field_oracle,
    joachimsthal,
    joachimsthal_values,
    probe_symplectic,
    reversibility_defect,
    reversibility_defect_many,
    symplectic_defect,
    theta_at_arc_length,
)
from .output import (
    PALETTE_SIX,
    PlotStyle,
    orbit_color,
    read_metadata,
    read_orbit_data,
    render_phase_portrait,
    render_table_figure,
    write_orbit_data,
)

__all__ = [
    "__version__",
    "BoundaryCurve",
    "perimeter",
    "MagneticBilliardsError",
    "ZeroGradient",
    "QuadratureFailure",
    "RootFindFailure",
    "VelocityOutOfRange",
    "DegenerateTangency",
    "ProbeFailure",
    "NoSecondIntersection",
    "InvalidGeometry",
    "PhasePoint",
    "BoundaryState",
    "FieldParams",
    "NO_FIELD",
    "StepBatch",
    "phase_to_state",
    "state_to_phase",
    "reflect",
    "billiard_step",
    "next_hit_line",
    "next_hit_arc",
    "step_many",
    "EnsembleConfig",
    "OrbitRecord",
    "mix_seed",
    "sample_initial",
    "run_orbit",
    "run_ensemble",
    "joachimsthal",
    "joachimsthal_values",
    "SymplecticProbe",
    "probe_symplectic",
    "symplectic_defect",
    "reversibility_defect",
    "reversibility_defect_many",
    "circle_field_oracle",
    "theta_at_arc_length",
    "PALETTE_SIX",
    "PlotStyle",
    "orbit_color",
    "write_orbit_data",
    "read_orbit_data",
    "read_metadata",
    "render_phase_portrait",
    "render_table_figure",
]
