"""Orbit data files and SVG figures.

Data files are plain CSV with 17 significant digits per float plus a
sibling key=value metadata file naming the geometry, field, sizes, seed,
and random-number generator, so a run can be reproduced or reloaded
exactly.  Figures are standalone SVG: a phase portrait on the full
rectangle [0, 2pi] x [-pi/2, pi/2] and a real-space table figure with
matching per-orbit colors.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .boundary import TWO_PI, BoundaryCurve
from .ensemble import RNG_ALGORITHM, EnsembleConfig, OrbitRecord, mix_seed
from .stepper import HALF_PI, FieldParams, phase_states
from .svgfig import SvgCanvas

__all__ = [
    "PALETTE_SIX",
    "PlotStyle",
    "orbit_color",
    "write_orbit_data",
    "read_orbit_data",
    "read_metadata",
    "config_from_metadata",
    "render_phase_portrait",
    "render_table_figure",
]

# Okabe-Ito colorblind-safe hues for the highlighted orbits
PALETTE_SIX = ("#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9")
BACKGROUND_GRAY = "#b0b0b0"
DATA_FORMAT = "magbilliards-orbits-1"

# beyond this many plotted points the portrait thins every orbit evenly
MAX_PORTRAIT_POINTS = 2_000_000


@dataclass(frozen=True)
class PlotStyle:
    """Figure options shared by the phase portrait and the table figure."""

    highlighted_orbit_ids: tuple = (0, 1, 2, 3, 4, 5)
    palette_mode: str = "fixed-six"
    background_point_size: float = 0.6
    highlight_point_size: float = 1.6
    points_on_table: int = 500
    overlay_paths: bool = False

    def __post_init__(self):
        if self.palette_mode not in ("fixed-six", "random-per-orbit"):
            raise ValueError("palette_mode must be 'fixed-six' or 'random-per-orbit'")
        if len(set(self.highlighted_orbit_ids)) != len(self.highlighted_orbit_ids):
            raise ValueError("highlighted_orbit_ids must be distinct")
        if self.points_on_table < 0:
            raise ValueError("points_on_table must be nonnegative")
        if self.background_point_size <= 0 or self.highlight_point_size <= 0:
            raise ValueError("point sizes must be positive")


def _seeded_color(orbit_seed: int) -> str:
    """Deterministic vivid color keyed by the orbit's own seed."""
    hue = ((orbit_seed >> 11) & ((1 << 53) - 1)) / float(1 << 53)
    sat = 0.55 + 0.40 * (((orbit_seed >> 3) & 0xFF) / 255.0)
    val = 0.60 + 0.35 * (((orbit_seed >> 23) & 0xFF) / 255.0)
    r, g, b = colorsys.hsv_to_rgb(hue, sat, val)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def orbit_color(style: PlotStyle, highlight_rank: int, record: OrbitRecord) -> str:
    """Color of one orbit, identical across both figure kinds."""
    if style.palette_mode == "random-per-orbit":
        return _seeded_color(record.orbit_seed)
    return PALETTE_SIX[highlight_rank % len(PALETTE_SIX)]


# -- data files -------------------------------------------------------


def _metadata_path(data_path: Path) -> Path:
    return data_path.with_name(data_path.stem + ".meta")


def write_orbit_data(records: list[OrbitRecord], destination, config: EnsembleConfig) -> Path:
    """Write the CSV trace plus its sibling metadata file; returns the CSV path."""
    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("orbit_id,step_index,theta_pos,theta_vel,x,y\n")
        for rec in records:
            oid = rec.orbit_id
            fh.writelines(
                "%d,%d,%.17g,%.17g,%.17g,%.17g\n"
                % (oid, k, rec.theta_pos[k], rec.theta_vel[k],
                   rec.positions[k, 0], rec.positions[k, 1])
                for k in range(len(rec))
            )

    full_loop_ids = [str(r.orbit_id) for r in records if "full_loop" in r.flags]
    meta = {
        "format": DATA_FORMAT,
        "tool_version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "numpy_version": np.__version__,
        "semi_axis_a": "%.17g" % config.curve.semi_axis_a,
        "semi_axis_b": "%.17g" % config.curve.semi_axis_b,
        "power_p": "%.17g" % config.curve.power_p,
        "field_strength": "%.17g" % config.field.field_strength,
        "number_of_orbits": str(config.number_of_orbits),
        "points_per_orbit": str(config.points_per_orbit),
        "cutoff_delta": "%.17g" % config.cutoff_delta,
        "tolerance": "%.17g" % config.tolerance,
        "master_seed": str(config.master_seed),
        "highlight_count": str(config.highlight_count),
        "full_loop_orbits": ",".join(full_loop_ids),
    }
    meta_lines = [f"{key}={value}\n" for key, value in meta.items()]
    with open(_metadata_path(destination), "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(meta_lines)
    return destination


def read_metadata(path) -> dict:
    """Parse a key=value metadata file (the CSV's sibling also accepted)."""
    path = Path(path)
    if path.suffix == ".csv":
        path = _metadata_path(path)
    meta = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        meta[key] = value
    return meta


def config_from_metadata(meta: dict) -> EnsembleConfig:
    """Rebuild the run configuration recorded in a metadata mapping."""
    curve = BoundaryCurve(
        semi_axis_a=float(meta["semi_axis_a"]),
        semi_axis_b=float(meta["semi_axis_b"]),
        power_p=float(meta["power_p"]),
    )
    return EnsembleConfig(
        curve=curve,
        field=FieldParams(float(meta["field_strength"])),
        number_of_orbits=int(meta["number_of_orbits"]),
        points_per_orbit=int(meta["points_per_orbit"]),
        cutoff_delta=float(meta["cutoff_delta"]),
        tolerance=float(meta["tolerance"]),
        master_seed=int(meta["master_seed"]),
        highlight_count=int(meta["highlight_count"]),
    )


def read_orbit_data(path) -> tuple[list[OrbitRecord], EnsembleConfig]:
    """Load a CSV trace and its metadata back into records and a config.

    terminated_early is inferred from short row groups; full-loop orbits
    are listed in the metadata.  Positions are taken from the file, not
    recomputed.
    """
    path = Path(path)
    meta = read_metadata(path)
    if meta.get("format") != DATA_FORMAT:
        raise ValueError(f"unrecognized data format {meta.get('format')!r}")
    config = config_from_metadata(meta)
    full_loop_ids = {int(tok) for tok in meta.get("full_loop_orbits", "").split(",") if tok}

    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    ids = data[:, 0].astype(np.int64)
    cut = np.flatnonzero(np.diff(ids)) + 1
    records = []
    expected = config.points_per_orbit + 1
    for chunk in np.split(data, cut):
        oid = int(chunk[0, 0])
        flags = set()
        if chunk.shape[0] < expected:
            flags.add("terminated_early")
        if oid in full_loop_ids:
            flags.add("full_loop")
        records.append(
            OrbitRecord(
                orbit_id=oid,
                orbit_seed=mix_seed(config.master_seed, oid),
                theta_pos=chunk[:, 2].copy(),
                theta_vel=chunk[:, 3].copy(),
                positions=chunk[:, 4:6].copy(),
                flags=frozenset(flags),
            )
        )
    return records, config


# -- phase portrait ---------------------------------------------------

_PORTRAIT_W, _PORTRAIT_H = 960.0, 560.0
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 80.0, 26.0, 26.0, 62.0


def _portrait_transform():
    w = _PORTRAIT_W - _MARGIN_L - _MARGIN_R
    h = _PORTRAIT_H - _MARGIN_T - _MARGIN_B

    def to_px(theta_pos: np.ndarray, theta_vel: np.ndarray):
        x = _MARGIN_L + (theta_pos / TWO_PI) * w
        y = _MARGIN_T + (1.0 - (theta_vel + HALF_PI) / math.pi) * h
        return x, y

    return to_px, w, h


def _scatter(canvas: SvgCanvas, xs: np.ndarray, ys: np.ndarray, color: str, size: float) -> None:
    canvas.group_start(fill=color)
    for x, y in zip(xs, ys):
        canvas.circle(x, y, size)
    canvas.group_end()


def _split_highlights(records: list[OrbitRecord], style: PlotStyle):
    """(background records, [(rank, highlighted record), ...]) in draw order."""
    by_id = {rec.orbit_id: rec for rec in records}
    highlighted = [(rank, by_id[oid])
                   for rank, oid in enumerate(style.highlighted_orbit_ids) if oid in by_id]
    if style.palette_mode == "random-per-orbit":
        return records, []
    chosen = {rec.orbit_id for _, rec in highlighted}
    background = [rec for rec in records if rec.orbit_id not in chosen]
    return background, highlighted


def render_phase_portrait(records: list[OrbitRecord], style: PlotStyle, destination) -> Path:
    """Scatter all orbits in (theta_pos, theta_vel); returns the SVG path."""
    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)
    to_px, w, h = _portrait_transform()

    total = sum(len(rec) for rec in records)
    stride = max(1, math.ceil(total / MAX_PORTRAIT_POINTS))

    canvas = SvgCanvas(_PORTRAIT_W, _PORTRAIT_H)
    canvas.desc(
        f"phase portrait; orbits={len(records)} points={total} stride={stride}"
    )

    background, highlighted = _split_highlights(records, style)
    if style.palette_mode == "random-per-orbit":
        for rec in background:
            x, y = to_px(rec.theta_pos[::stride], rec.theta_vel[::stride])
            _scatter(canvas, x, y, _seeded_color(rec.orbit_seed), style.background_point_size)
    else:
        canvas.group_start(fill=BACKGROUND_GRAY)
        for rec in background:
            x, y = to_px(rec.theta_pos[::stride], rec.theta_vel[::stride])
            for px, py in zip(x, y):
                canvas.circle(px, py, style.background_point_size)
        canvas.group_end()
        for rank, rec in highlighted:
            x, y = to_px(rec.theta_pos[::stride], rec.theta_vel[::stride])
            _scatter(canvas, x, y, orbit_color(style, rank, rec), style.highlight_point_size)

    # axes drawn last so dense scatters cannot cover them
    canvas.rect(_MARGIN_L, _MARGIN_T, w, h, fill="none", stroke="#000000", stroke_width=1.2)
    x_ticks = [(0.0, "0"), (math.pi / 2, "π/2"), (math.pi, "π"),
               (3 * math.pi / 2, "3π/2"), (TWO_PI, "2π")]
    y_ticks = [(-HALF_PI, "-π/2"), (-HALF_PI / 2, "-π/4"), (0.0, "0"),
               (HALF_PI / 2, "π/4"), (HALF_PI, "π/2")]
    base_y = _MARGIN_T + h
    for value, label in x_ticks:
        px, _ = to_px(np.array(value), np.array(0.0))
        canvas.line(px, base_y, px, base_y + 6, stroke="#000000")
        canvas.text(px, base_y + 24, label)
    for value, label in y_ticks:
        _, py = to_px(np.array(0.0), np.array(value))
        canvas.line(_MARGIN_L - 6, py, _MARGIN_L, py, stroke="#000000")
        canvas.text(_MARGIN_L - 12, py + 5, label, anchor="end")
    canvas.text(_MARGIN_L + w / 2, _PORTRAIT_H - 14, "θ_pos")
    canvas.text(_MARGIN_L - 34, _MARGIN_T - 8, "θ_vel", anchor="start")
    return canvas.write(destination)


# -- table figure -----------------------------------------------------

_TABLE_SIZE = 720.0
_TABLE_PAD = 0.08


def _arc_overlay_points(curve: BoundaryCurve, field: FieldParams,
                        tp: np.ndarray, tv: np.ndarray) -> list[tuple[float, float]]:
    """Sampled Larmor-arc polyline through consecutive reflections."""
    pos, vel = phase_states(curve, tp, tv)
    r = field.larmor_radius
    sigma = field.orientation
    pts: list[tuple[float, float]] = []
    for i in range(len(tp) - 1):
        px, py = pos[i]
        qx, qy = pos[i + 1]
        cx = px - sigma * r * vel[i, 1]
        cy = py + sigma * r * vel[i, 0]
        a0 = math.atan2(py - cy, px - cx)
        a1 = math.atan2(qy - cy, qx - cx)
        sweep = (sigma * (a1 - a0)) % TWO_PI
        if sweep < 1e-12:
            continue
        for frac in np.linspace(0.0, 1.0, 24):
            ang = a0 + sigma * sweep * frac
            pts.append((cx + r * math.cos(ang), cy + r * math.sin(ang)))
    return pts


def render_table_figure(curve: BoundaryCurve, records: list[OrbitRecord], style: PlotStyle,
                        destination, field: FieldParams | None = None) -> Path:
    """Draw the table outline and reflection points in real space.

    Highlighted orbits show their first points_on_table reflection points
    in the portrait's colors.  With overlay_paths set, the chords (or,
    given a nonzero field, the Larmor arcs) between those points are
    drawn too.
    """
    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)

    half_w = curve.semi_axis_a * (1.0 + _TABLE_PAD)
    half_h = curve.semi_axis_b * (1.0 + _TABLE_PAD)
    scale = (_TABLE_SIZE / 2.0) / max(half_w, half_h)
    cx0 = cy0 = _TABLE_SIZE / 2.0

    def to_px(x, y):
        return cx0 + np.asarray(x) * scale, cy0 - np.asarray(y) * scale

    canvas = SvgCanvas(_TABLE_SIZE, _TABLE_SIZE)
    canvas.desc(
        f"table figure; a={curve.semi_axis_a:g} b={curve.semi_axis_b:g} p={curve.power_p:g}"
    )

    theta = np.linspace(0.0, TWO_PI, 2049)
    ring = curve.point_at_polar(theta)
    bx, by = to_px(ring[:, 0], ring[:, 1])
    canvas.polyline(list(zip(bx, by)), stroke="#000000", stroke_width=1.6)

    _, highlighted = _split_highlights(records, style)
    if style.palette_mode == "random-per-orbit":
        by_id = {rec.orbit_id: rec for rec in records}
        highlighted = [(rank, by_id[oid])
                       for rank, oid in enumerate(style.highlighted_orbit_ids) if oid in by_id]
    for rank, rec in highlighted:
        color = orbit_color(style, rank, rec)
        n_pts = min(style.points_on_table, len(rec))
        if n_pts == 0:
            continue
        if style.overlay_paths and n_pts > 1:
            tp, tv = rec.theta_pos[:n_pts], rec.theta_vel[:n_pts]
            if field is not None and field.field_strength != 0.0:
                path_xy = _arc_overlay_points(curve, field, tp, tv)
            else:
                path_xy = list(zip(rec.positions[:n_pts, 0], rec.positions[:n_pts, 1]))
            px = [to_px(x, y) for x, y in path_xy]
            canvas.polyline([(float(a), float(b)) for a, b in px],
                            stroke=color, stroke_width=0.5)
        dx, dy = to_px(rec.positions[:n_pts, 0], rec.positions[:n_pts, 1])
        _scatter(canvas, dx, dy, color, style.highlight_point_size)
    return canvas.write(destination)
