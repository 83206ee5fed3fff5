"""Reproducible orbit ensembles.

Every orbit owns a private PCG64 generator seeded by a SplitMix64 mix of
the master seed and the orbit index, so results are independent of how
many orbits run, in what order, or in what batch widths.  The batch
runner steps all orbits in lockstep through the vectorized kernel; the
kernel's elementwise operations make each lane bit-identical to a
single-orbit run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import TWO_PI, BoundaryCurve
from .errors import MagneticBilliardsError
from .stepper import HALF_PI, FieldParams, PhasePoint, step_many

__all__ = [
    "RNG_ALGORITHM",
    "mix_seed",
    "EnsembleConfig",
    "OrbitRecord",
    "sample_initial",
    "run_orbit",
    "run_ensemble",
]

RNG_ALGORITHM = "numpy.random.PCG64"

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix_seed(master_seed: int, orbit_index: int) -> int:
    """Per-orbit 64-bit seed: SplitMix64 output at position orbit_index + 1.

    The +1 keeps orbit 0 from reusing the finalized master seed itself.
    """
    if orbit_index < 0:
        raise ValueError("orbit_index must be nonnegative")
    z = (master_seed + (orbit_index + 1) * _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class EnsembleConfig:
    """Geometry, field, sizes, and seeding for one ensemble run."""

    curve: BoundaryCurve
    field: FieldParams = FieldParams(0.0)
    number_of_orbits: int = 1
    points_per_orbit: int = 1000
    cutoff_delta: float = 0.01
    tolerance: float = 1e-9
    master_seed: int = 0
    highlight_count: int = 6

    def __post_init__(self):
        if self.number_of_orbits < 1:
            raise ValueError("number_of_orbits must be at least 1")
        if self.points_per_orbit < 1:
            raise ValueError("points_per_orbit must be at least 1")
        if not 0.0 <= self.cutoff_delta < HALF_PI:
            raise ValueError("cutoff_delta must lie in [0, pi/2)")
        if not 0.0 < self.tolerance <= 1e-3:
            raise ValueError("tolerance must lie in (0, 1e-3]")
        if self.highlight_count < 0:
            raise ValueError("highlight_count must be nonnegative")


@dataclass
class OrbitRecord:
    """One orbit's phase trace, boundary positions, seed, and flags.

    Arrays hold the initial point plus every completed step; a degenerate
    tangency truncates the orbit and sets the terminated_early flag.
    """

    orbit_id: int
    orbit_seed: int
    theta_pos: np.ndarray
    theta_vel: np.ndarray
    positions: np.ndarray
    flags: frozenset = field(default_factory=frozenset)

    def __len__(self) -> int:
        return self.theta_pos.size

    @property
    def points(self) -> list[PhasePoint]:
        return [PhasePoint(tp, tv) for tp, tv in zip(self.theta_pos, self.theta_vel)]


def sample_initial(rng: np.random.Generator, cutoff_delta: float = 0.01) -> PhasePoint:
    """Uniform draw from [0, 2pi) x (-pi/2 + delta, pi/2 - delta).

    theta_pos is drawn before theta_vel; callers relying on reproducible
    streams depend on that order.
    """
    theta_pos = rng.uniform(0.0, TWO_PI)
    theta_vel = rng.uniform(-HALF_PI + cutoff_delta, HALF_PI - cutoff_delta)
    return PhasePoint(theta_pos, theta_vel)


def _step_isolated(config: EnsembleConfig, cur_tp: np.ndarray, cur_tv: np.ndarray):
    """step_many with per-lane fallback; returns (tp, tv, full_loop, stop).

    A solver failure aborts a whole vectorized call, so on failure each
    lane is retried alone; lanes that still fail are stopped with their
    inputs kept, the rest continue.  Lane independence of the kernel
    keeps retried lanes bit-identical to the batched path.
    """
    try:
        out = step_many(config.curve, cur_tp, cur_tv, config.field, config.tolerance)
        return out.theta_pos, out.theta_vel, out.full_loop, out.degenerate.copy()
    except MagneticBilliardsError:
        pass
    n = cur_tp.size
    tp = cur_tp.copy()
    tv = cur_tv.copy()
    full = np.zeros(n, dtype=bool)
    stop = np.zeros(n, dtype=bool)
    for i in range(n):
        try:
            out = step_many(config.curve, cur_tp[i:i + 1], cur_tv[i:i + 1],
                            config.field, config.tolerance)
        except MagneticBilliardsError:
            stop[i] = True
            continue
        tp[i] = out.theta_pos[0]
        tv[i] = out.theta_vel[0]
        full[i] = out.full_loop[0]
        stop[i] = out.degenerate[0]
    return tp, tv, full, stop


def _iterate_batch(config: EnsembleConfig, theta_pos0: np.ndarray, theta_vel0: np.ndarray):
    """Lockstep iteration; returns (TP, TV, lengths, full_loop, early) arrays.

    TP/TV have shape (points_per_orbit + 1, n); rows past an orbit's
    recorded length stay NaN.  Lanes that stop (degenerate tangency or
    solver failure) are compressed out so the survivors keep stepping at
    full speed.
    """
    n = theta_pos0.size
    steps = config.points_per_orbit
    tp_all = np.full((steps + 1, n), np.nan)
    tv_all = np.full((steps + 1, n), np.nan)
    tp_all[0] = theta_pos0
    tv_all[0] = theta_vel0
    lengths = np.full(n, steps + 1, dtype=np.int64)
    saw_full_loop = np.zeros(n, dtype=bool)
    ended_early = np.zeros(n, dtype=bool)

    alive = np.arange(n)
    cur_tp = theta_pos0.copy()
    cur_tv = theta_vel0.copy()
    for k in range(1, steps + 1):
        new_tp, new_tv, full, stop = _step_isolated(config, cur_tp, cur_tv)
        if stop.any():
            keep = ~stop
            dead = alive[stop]
            ended_early[dead] = True
            lengths[dead] = k
            alive = alive[keep]
            cur_tp = new_tp[keep]
            cur_tv = new_tv[keep]
            saw_full_loop[alive] |= full[keep]
            if alive.size == 0:
                break
            tp_all[k, alive] = cur_tp
            tv_all[k, alive] = cur_tv
        else:
            cur_tp = new_tp
            cur_tv = new_tv
            saw_full_loop[alive] |= full
            if alive.size == n:
                tp_all[k] = cur_tp
                tv_all[k] = cur_tv
            else:
                tp_all[k, alive] = cur_tp
                tv_all[k, alive] = cur_tv
    return tp_all, tv_all, lengths, saw_full_loop, ended_early


def _make_record(config: EnsembleConfig, orbit_id: int, orbit_seed: int,
                 tp_col: np.ndarray, tv_col: np.ndarray, length: int,
                 full_loop: bool, early: bool) -> OrbitRecord:
    tp = tp_col[:length].copy()
    tv = tv_col[:length].copy()
    flags = set()
    if full_loop:
        flags.add("full_loop")
    if early:
        flags.add("terminated_early")
    return OrbitRecord(
        orbit_id=orbit_id,
        orbit_seed=orbit_seed,
        theta_pos=tp,
        theta_vel=tv,
        positions=config.curve.point_at_polar(tp),
        flags=frozenset(flags),
    )


def run_orbit(config: EnsembleConfig, initial: PhasePoint | None = None,
              orbit_id: int = 0) -> OrbitRecord:
    """Run a single orbit; initial defaults to the orbit's own seeded draw."""
    orbit_seed = mix_seed(config.master_seed, orbit_id)
    if initial is None:
        initial = sample_initial(np.random.default_rng(orbit_seed), config.cutoff_delta)
    tp_all, tv_all, lengths, full, early = _iterate_batch(
        config, np.array([initial.theta_pos]), np.array([initial.theta_vel])
    )
    return _make_record(config, orbit_id, orbit_seed, tp_all[:, 0], tv_all[:, 0],
                        int(lengths[0]), bool(full[0]), bool(early[0]))


def run_ensemble(config: EnsembleConfig) -> list[OrbitRecord]:
    """Run all orbits in lockstep and return their records in orbit order."""
    n = config.number_of_orbits
    seeds = [mix_seed(config.master_seed, i) for i in range(n)]
    tp0 = np.empty(n)
    tv0 = np.empty(n)
    for i, seed in enumerate(seeds):
        z = sample_initial(np.random.default_rng(seed), config.cutoff_delta)
        tp0[i] = z.theta_pos
        tv0[i] = z.theta_vel
    tp_all, tv_all, lengths, full, early = _iterate_batch(config, tp0, tv0)
    return [
        _make_record(config, i, seeds[i], tp_all[:, i], tv_all[:, i],
                     int(lengths[i]), bool(full[i]), bool(early[i]))
        for i in range(n)
    ]
