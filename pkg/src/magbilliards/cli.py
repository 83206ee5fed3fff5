"""Command-line front end.

Subcommands: ``simulate`` runs a seeded ensemble and writes the data
file plus both figures into one run directory, ``plot`` re-renders
figures from an existing run directory, ``example`` runs one of the
built-in presets, and ``verify`` executes the invariant suites on
desk-scale configurations and reports pass/fail.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 runtime simulation error.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .boundary import TWO_PI, BoundaryCurve
from .errors import InvalidGeometry, MagneticBilliardsError
from .stepper import HALF_PI, FieldParams, PhasePoint, billiard_step, step_many
from .ensemble import EnsembleConfig, run_ensemble
from .analysis import (
    circle_field_oracle,
    joachimsthal_values,
    reversibility_defect_many,
    symplectic_defect,
)
from .output import (
    PlotStyle,
    read_orbit_data,
    render_phase_portrait,
    render_table_figure,
    write_orbit_data,
)

__all__ = [
    "CliConfig",
    "ExamplePreset",
    "EXAMPLE_PRESETS",
    "resolve_geometry",
    "run_simulation",
    "run_example",
    "CheckResult",
    "VerificationReport",
    "run_verification",
    "build_parser",
    "main",
]

ECCENTRICITY_NOTE = (
    "mapping eccentricity to the minor semi-axis via b = a*|1 - eps^2|^(1/p); "
    "the traditional form with coefficient 1/(1 - eps^2) turns negative for eps > 1, "
    "so this mapping is a documented convention, not a canonical definition"
)


@dataclass(frozen=True)
class CliConfig:
    """One resolved command-line invocation."""

    subcommand: str = "simulate"
    field_B: float = 0.0
    semi_axis_a: float = 10.0
    semi_axis_b: float | None = None
    eccentricity_epsilon: float | None = None
    power_p: float = 2.0
    number_of_orbits: int = 1000
    points_per_orbit: int = 1000
    points_on_table: int = 500
    cutoff_delta: float = 0.01
    tolerance: float = 1e-9
    master_seed: int = 0
    highlight_count: int = 6
    palette_mode: str = "fixed-six"
    overlay_paths: bool = False
    output_directory: Path = Path("out")

    def __post_init__(self):
        if self.subcommand not in ("simulate", "plot", "verify", "example"):
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        for name in ("number_of_orbits", "points_per_orbit", "points_on_table", "highlight_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not 0.0 < self.tolerance <= 1e-3:
            raise ValueError("tolerance must lie in (0, 1e-3]")
        if not 0.0 <= self.cutoff_delta < HALF_PI:
            raise ValueError("cutoff_delta must lie in [0, pi/2)")
        if self.palette_mode not in ("fixed-six", "random-per-orbit"):
            raise ValueError("palette_mode must be 'fixed-six' or 'random-per-orbit'")
        if (self.subcommand == "simulate"
                and self.semi_axis_b is None and self.eccentricity_epsilon is None):
            raise ValueError("provide either --semi-axis-b or --eccentricity")


def resolve_geometry(config: CliConfig) -> BoundaryCurve:
    """Boundary curve selected by a config: explicit semi-axes win over eps."""
    if config.semi_axis_b is not None:
        if config.eccentricity_epsilon is not None:
            warnings.warn("both semi_axis_b and eccentricity given; semi_axis_b wins",
                          stacklevel=2)
        return BoundaryCurve(config.semi_axis_a, config.semi_axis_b, config.power_p)
    eps = config.eccentricity_epsilon
    if eps is None:
        raise InvalidGeometry("neither semi_axis_b nor eccentricity_epsilon given")
    shrink = abs(1.0 - eps * eps)
    if shrink == 0.0:
        raise InvalidGeometry("eccentricity 1 collapses the minor semi-axis to zero")
    if eps != 0.0:
        warnings.warn(ECCENTRICITY_NOTE, stacklevel=2)
    b = config.semi_axis_a * shrink ** (1.0 / config.power_p)
    return BoundaryCurve(config.semi_axis_a, b, config.power_p)


# -- presets ----------------------------------------------------------


@dataclass(frozen=True)
class ExamplePreset:
    """Parameter box of one built-in figure preset."""

    label: str
    field_B: float
    eccentricity: float
    power_p: float
    number_of_orbits: int
    points_per_orbit: int
    points_on_table: int | None
    palette_mode: str = "fixed-six"


EXAMPLE_PRESETS = {
    "0": ExamplePreset("0", 0.0, 1.5, 2.0, 1000, 1000, 1000),
    "1": ExamplePreset("1", 0.01, 1.5, 2.0, 1000, 1000, 2000),
    "2": ExamplePreset("2", 0.5, 1.5, 2.0, 1000, 1000, 500),
    "3": ExamplePreset("3", 1.0, 1.5, 2.0, 1000, 1000, 500),
    "4": ExamplePreset("4", 2.0, 1.5, 2.0, 1000, 1000, 500),
    "5": ExamplePreset("5", 0.0, 1.5, 2.005, 1000, 1000, 1000),
    "all": ExamplePreset("all", 1.0, 1.5, 2.0, 2000, 3000, None, "random-per-orbit"),
}


# -- drivers ----------------------------------------------------------


def _ensemble_config(config: CliConfig, curve: BoundaryCurve) -> EnsembleConfig:
    return EnsembleConfig(
        curve=curve,
        field=FieldParams(config.field_B),
        number_of_orbits=config.number_of_orbits,
        points_per_orbit=config.points_per_orbit,
        cutoff_delta=config.cutoff_delta,
        tolerance=config.tolerance,
        master_seed=config.master_seed,
        highlight_count=config.highlight_count,
    )


def _plot_style(config: CliConfig) -> PlotStyle:
    return PlotStyle(
        highlighted_orbit_ids=tuple(range(config.highlight_count)),
        palette_mode=config.palette_mode,
        points_on_table=config.points_on_table,
        overlay_paths=config.overlay_paths,
    )


def run_simulation(config: CliConfig) -> dict[str, Path]:
    """simulate: ensemble, data file, metadata, and both figures."""
    curve = resolve_geometry(config)
    ens = _ensemble_config(config, curve)
    records = run_ensemble(ens)
    out = Path(config.output_directory)
    out.mkdir(parents=True, exist_ok=True)
    data_path = write_orbit_data(records, out / "orbits.csv", ens)
    style = _plot_style(config)
    portrait = render_phase_portrait(records, style, out / "phase_portrait.svg")
    table = render_table_figure(curve, records, style, out / "table.svg", field=ens.field)
    return {
        "data": data_path,
        "metadata": data_path.with_name("orbits.meta"),
        "phase_portrait": portrait,
        "table_figure": table,
    }


def run_plot(config: CliConfig) -> dict[str, Path]:
    """plot: re-render both figures from output_directory/orbits.csv."""
    out = Path(config.output_directory)
    records, ens = read_orbit_data(out / "orbits.csv")
    style = _plot_style(config)
    portrait = render_phase_portrait(records, style, out / "phase_portrait.svg")
    table = render_table_figure(ens.curve, records, style, out / "table.svg", field=ens.field)
    return {"phase_portrait": portrait, "table_figure": table}


def run_example(number: int | str, output_directory=Path("out"),
                master_seed: int = 0) -> dict[str, Path]:
    """Run one preset into output_directory/example_<n>/."""
    key = str(number)
    if key not in EXAMPLE_PRESETS:
        raise ValueError(f"unknown example {number!r}; choose 0..5 or 'all'")
    preset = EXAMPLE_PRESETS[key]
    config = CliConfig(
        subcommand="simulate",
        field_B=preset.field_B,
        eccentricity_epsilon=preset.eccentricity,
        power_p=preset.power_p,
        number_of_orbits=preset.number_of_orbits,
        points_per_orbit=preset.points_per_orbit,
        points_on_table=preset.points_on_table or 0,
        palette_mode=preset.palette_mode,
        master_seed=master_seed,
        output_directory=Path(output_directory) / f"example_{preset.label}",
    )
    return run_simulation(config)


# -- verification -----------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    bound: float
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        lines = [f"magbilliards {__version__} verification"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{status}  {c.name:<28} measured {c.measured:.3e}  bound {c.bound:.1e}"
                         + (f"  ({c.detail})" if c.detail else ""))
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _random_phase(rng, n, delta=0.05):
    tp = rng.uniform(0.0, TWO_PI, n)
    tv = rng.uniform(-HALF_PI + delta, HALF_PI - delta, n)
    return tp, tv


def _max_residual(curve, field, tp, tv, steps, tol):
    worst = 0.0
    for _ in range(steps):
        out = step_many(curve, tp, tv, field, tol)
        worst = max(worst, float(np.max(np.abs(out.residual))))
        tp, tv = out.theta_pos, out.theta_vel
    return worst


def run_verification(config: CliConfig) -> VerificationReport:
    """Desk-scale invariant suites; bounds follow the config tolerance.

    A check whose simulation aborts (for example a tolerance below float
    resolution) is recorded as a failure rather than raised, so verify
    always produces a full report.
    """
    checks = []
    ellipse = BoundaryCurve(10.0, 8.0)
    circle = BoundaryCurve(10.0, 10.0)
    rng = np.random.default_rng(20230817)

    def checked(name, bound, detail, fn):
        try:
            measured = fn()
        except MagneticBilliardsError as exc:
            checks.append(CheckResult(name, math.inf, bound, False, f"aborted: {exc}"))
        else:
            checks.append(CheckResult(name, measured, bound, measured <= bound, detail))

    field_list = [0.0, 0.5, 2.0]
    if config.field_B not in field_list:
        field_list.append(config.field_B)

    def residual_check():
        worst = 0.0
        for b_val in field_list:
            tp, tv = _random_phase(rng, 48)
            worst = max(worst, _max_residual(ellipse, FieldParams(b_val), tp, tv, 200,
                                             config.tolerance))
        return worst

    checked("boundary_residual", config.tolerance,
            "ellipse a=10 b=8, B in {" + ",".join(f"{b:g}" for b in field_list) + "}",
            residual_check)

    circle_fields = [0.0, 0.01, 0.5, 1.0, 2.0]
    if config.field_B not in circle_fields:
        circle_fields.append(config.field_B)

    def theta_vel_range_check():
        worst = 0.0
        for b_val in circle_fields:
            tp, tv = _random_phase(rng, 16)
            lo, hi = tv.copy(), tv.copy()
            for _ in range(800):
                out = step_many(circle, tp, tv, FieldParams(b_val), config.tolerance)
                tp, tv = out.theta_pos, out.theta_vel
                np.minimum(lo, tv, out=lo)
                np.maximum(hi, tv, out=hi)
            worst = max(worst, float(np.max(hi - lo)))
        return worst

    checked("circle_theta_vel_range", 1e-8,
            "800 steps, B in {" + ",".join(f"{b:g}" for b in circle_fields) + "}",
            theta_vel_range_check)

    def chord_advance_check():
        tp, tv = _random_phase(rng, 256)
        out = step_many(circle, tp, tv, FieldParams(0.0), config.tolerance)
        adv = (out.theta_pos - tp) % TWO_PI
        return float(np.max(np.abs(adv - (np.pi - 2.0 * tv))))

    checked("circle_chord_advance", 1e-8, "256 random states", chord_advance_check)

    oracle_fields = [0.5, 1.0, 2.0]
    if config.field_B != 0.0 and config.field_B not in oracle_fields:
        oracle_fields.append(config.field_B)

    def oracle_check():
        worst = 0.0
        for b_val in oracle_fields:
            fld = FieldParams(b_val)
            tp, tv = _random_phase(rng, 128)
            for i in range(tp.size):
                z = PhasePoint(tp[i], tv[i])
                z_step = billiard_step(circle, z, fld, config.tolerance)
                z_oracle = circle_field_oracle(10.0, fld, z)
                d_pos = abs(z_step.theta_pos - z_oracle.theta_pos)
                d_pos = min(d_pos, TWO_PI - d_pos)
                worst = max(worst, d_pos, abs(z_step.theta_vel - z_oracle.theta_vel))
        return worst

    checked("circle_magnetic_oracle", 1e-8,
            "B in {" + ",".join(f"{b:g}" for b in oracle_fields) + "}", oracle_check)

    def joachimsthal_check():
        tp, tv = _random_phase(rng, 24)
        j_ref = joachimsthal_values(ellipse, tp, tv)
        lo, hi = j_ref.copy(), j_ref.copy()
        cur_tp, cur_tv = tp, tv
        for _ in range(300):
            out = step_many(ellipse, cur_tp, cur_tv, FieldParams(0.0), config.tolerance)
            cur_tp, cur_tv = out.theta_pos, out.theta_vel
            j_now = joachimsthal_values(ellipse, cur_tp, cur_tv)
            np.minimum(lo, j_now, out=lo)
            np.maximum(hi, j_now, out=hi)
        scale = np.maximum(np.abs(j_ref), 1e-3)
        return float(np.max((hi - lo) / scale))

    checked("ellipse_joachimsthal_spread", 1e-7, "24 orbits x 300 steps, B=0",
            joachimsthal_check)

    def preset_curve(p):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return resolve_geometry(CliConfig(subcommand="verify",
                                              eccentricity_epsilon=1.5, power_p=p))

    grid = [(b_val, p) for b_val in (0.0, 0.5, 1.0, 2.0) for p in (2.0, 2.005)]

    def symplectic_check():
        worst = 0.0
        for b_val, p in grid:
            curve = preset_curve(p)
            tp, tv = _random_phase(rng, 12, delta=0.1)
            for i in range(tp.size):
                worst = max(worst, symplectic_defect(curve, PhasePoint(tp[i], tv[i]),
                                                     FieldParams(b_val)))
        return worst

    checked("symplectic_defect", 1e-4, "8 (B,p) cells x 12 points", symplectic_check)

    def reversibility_check():
        worst = 0.0
        for b_val, p in grid:
            curve = preset_curve(p)
            tp, tv = _random_phase(rng, 12, delta=0.1)
            worst = max(worst, float(np.max(reversibility_defect_many(
                curve, tp, tv, FieldParams(b_val), 60, config.tolerance))))
        return worst

    checked("reversibility", 1e-6, "8 (B,p) cells, 60-step round trips",
            reversibility_check)

    def line_limit_check():
        tp, tv = _random_phase(rng, 64)
        out_line = step_many(ellipse, tp, tv, FieldParams(0.0), config.tolerance)
        out_arc = step_many(ellipse, tp, tv, FieldParams(1e-6), config.tolerance)
        d_pos = np.abs(out_line.theta_pos - out_arc.theta_pos)
        d_pos = np.minimum(d_pos, TWO_PI - d_pos)
        return float(max(np.max(d_pos),
                         np.max(np.abs(out_line.theta_vel - out_arc.theta_vel))))

    checked("straight_line_limit", 1e-4, "B=1e-6 arc vs chord, 64 states",
            line_limit_check)

    return VerificationReport(checks=tuple(checks))


# -- argument parsing -------------------------------------------------

_PALETTE_FLAGS = {"fixed": "fixed-six", "random": "random-per-orbit"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magbilliards",
        description="Magnetic billiards in convex superellipse tables.",
    )
    parser.add_argument("--version", action="version", version=f"magbilliards {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, include_sim_flags=True):
        if include_sim_flags:
            p.add_argument("--magnetic-field", type=float, default=0.0, metavar="B",
                           help="field strength; Larmor radius is 1/|B| (default 0)")
            p.add_argument("--eccentricity", type=float, default=None, metavar="EPS",
                           help="table eccentricity, mapped to b = a*|1-EPS^2|^(1/p)")
            p.add_argument("--power", type=float, default=2.0, metavar="P",
                           help="superellipse exponent p > 1 (default 2)")
            p.add_argument("--semi-axis-a", type=float, default=10.0, metavar="A",
                           help="horizontal semi-axis (default 10)")
            p.add_argument("--semi-axis-b", type=float, default=None, metavar="B",
                           help="vertical semi-axis; overrides --eccentricity")
            p.add_argument("--orbits", type=int, default=1000, metavar="N",
                           help="number of orbits (default 1000)")
            p.add_argument("--points-per-orbit", type=int, default=1000, metavar="N",
                           help="reflections per orbit (default 1000)")
            p.add_argument("--delta", type=float, default=0.01, metavar="D",
                           help="angular sampling cutoff (default 0.01)")
        p.add_argument("--points-on-table", type=int, default=500, metavar="N",
                       help="reflection points drawn per highlighted orbit (default 500)")
        p.add_argument("--seed", type=int, default=0, metavar="S",
                       help="64-bit master seed (default 0)")
        p.add_argument("--out", type=Path, default=Path("out"), metavar="DIR",
                       help="output directory (default ./out)")
        p.add_argument("--palette", choices=sorted(_PALETTE_FLAGS), default="fixed",
                       help="fixed: six-color highlights; random: per-orbit hues")
        p.add_argument("--highlight", type=int, default=6, metavar="N",
                       help="number of highlighted orbits (default 6)")
        p.add_argument("--overlay-paths", action="store_true",
                       help="draw chords/arcs between table points (debug)")
        p.add_argument("--tol", type=float, default=1e-9, metavar="T",
                       help="boundary accuracy tolerance (default 1e-9)")

    p_sim = sub.add_parser("simulate", help="run an ensemble and write data + figures")
    add_common(p_sim)

    p_plot = sub.add_parser("plot", help="re-render figures from an existing run directory")
    add_common(p_plot, include_sim_flags=False)

    p_verify = sub.add_parser("verify", help="run the invariant suites and report")
    p_verify.add_argument("--magnetic-field", type=float, default=1.0, metavar="B",
                          help="extra field value folded into the suites (default 1)")
    p_verify.add_argument("--tol", type=float, default=1e-9, metavar="T",
                          help="boundary accuracy bound (default 1e-9)")

    p_ex = sub.add_parser("example", help="run a built-in preset")
    p_ex.add_argument("number", choices=[*"012345", "all"],
                      help="preset index 0..5 or 'all'")
    p_ex.add_argument("--out", type=Path, default=Path("out"), metavar="DIR")
    p_ex.add_argument("--seed", type=int, default=0, metavar="S")
    return parser


def _config_from_args(args: argparse.Namespace) -> CliConfig:
    if args.command == "verify":
        return CliConfig(subcommand="verify", field_B=args.magnetic_field, tolerance=args.tol)
    if args.command == "example":
        return CliConfig(subcommand="example", master_seed=args.seed,
                         output_directory=args.out, eccentricity_epsilon=1.5)
    common = dict(
        subcommand=args.command,
        points_on_table=args.points_on_table,
        master_seed=args.seed,
        output_directory=args.out,
        palette_mode=_PALETTE_FLAGS[args.palette],
        highlight_count=args.highlight,
        overlay_paths=args.overlay_paths,
        tolerance=args.tol,
    )
    if args.command == "plot":
        return CliConfig(**common)
    return CliConfig(
        field_B=args.magnetic_field,
        semi_axis_a=args.semi_axis_a,
        semi_axis_b=args.semi_axis_b,
        eccentricity_epsilon=args.eccentricity,
        power_p=args.power,
        number_of_orbits=args.orbits,
        points_per_orbit=args.points_per_orbit,
        cutoff_delta=args.delta,
        **common,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "simulate":
            paths = run_simulation(config)
        elif args.command == "plot":
            paths = run_plot(config)
        elif args.command == "example":
            paths = run_example(args.number, args.out, args.seed)
        else:
            report = run_verification(config)
            print(report.to_text())
            return 0 if report.passed else 1
    except InvalidGeometry as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except MagneticBilliardsError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
