"""Monte Carlo ground truth for coverage and hitting probabilities.

Scenes are stationary snapshots of the full 3D layout: a Poisson field of
ceiling APs in the room, axis-aligned walls, rotated rectangular blockers and
one associated UE per AP. The typical user sits at the room center.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numba
import numpy as np

from ..hitting import Environment
from ..scenario import Scenario, derive_constants
from . import kernels as _k
from .geometry import in_self_blockage, is_human_blocked, is_wall_blocked
from .rng import seed_to_u64

# prefer layers that need no external runtime check; an explicit env setting wins
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

MAX_ASSOCIATION_ATTEMPTS = 1000
MAX_WALL_REDRAWS = 100_000
_BATCH = 50_000


@dataclass(frozen=True)
class Estimate:
    """Empirical probability with a normal-approximation 95% half-width.

    ``rejected`` counts trials (or UEs, for coverage) whose association
    redraws ran out; they are kept with their last draw.
    """

    mean: float
    trials: int
    rejected: int = 0

    @property
    def half_width(self) -> float:
        return 1.96 * math.sqrt(self.mean * (1.0 - self.mean) / self.trials)

    @property
    def interval(self) -> tuple[float, float]:
        return self.mean - self.half_width, self.mean + self.half_width


@dataclass(frozen=True)
class Scene:
    """One sampled snapshot; coordinates are horizontal, the user is at the origin."""

    x00: float
    serving_azimuth: float
    walls: np.ndarray          # (n, 4): cx, cy, orientation, length
    humans: np.ndarray         # (n, 3): cx, cy, orientation
    aps: np.ndarray            # (n, 2)
    ues: np.ndarray            # (n, 2), the UE each AP serves
    ue_rejected: np.ndarray    # (n,) bool
    wall_redraws: int
    wall_conditioning_ok: bool

    @property
    def serving_ap(self) -> tuple[float, float]:
        return (self.x00 * math.cos(self.serving_azimuth), self.x00 * math.sin(self.serving_azimuth))


def _seed(rng) -> np.uint64:
    if isinstance(rng, np.random.Generator):
        return seed_to_u64(int(rng.integers(0, 2 ** 63)))
    return seed_to_u64(int(rng))


def pack_parameters(s: Scenario, x00: float = 0.0, environment="indoor") -> np.ndarray:
    """Flatten a scenario into the kernels' parameter vector."""
    env = Environment.parse(environment)
    if env is Environment.OPEN_OFFICE:
        s = s.without_walls()
    d = derive_constants(s)
    net, blk = s.network, s.blockage
    p = np.zeros(_k.N_PARAMS)
    p[_k.X00] = x00
    p[_k.HBAR] = d.hbar
    p[_k.TRUNC] = (blk.blocker_height - net.ue_height) / d.hbar
    p[_k.ROOM_L] = net.room_length
    p[_k.ROOM_W] = net.room_width
    p[_k.LAM_A] = net.ap_density
    p[_k.LAM_B] = blk.blocker_density
    p[_k.LAM_W] = blk.wall_density
    p[_k.W1] = blk.blocker_w1
    p[_k.W2] = blk.blocker_w2
    p[_k.WALL_LEN] = blk.wall_mean_length
    p[_k.WALL_EXP] = 1.0 if blk.wall_length_law == "exponential" else 0.0
    p[_k.OMEGA] = blk.self_block_angle
    p[_k.PHI_AH] = s.antenna.ap.phi_h
    p[_k.PHI_AV] = s.antenna.ap.phi_v
    p[_k.PHI_UH] = s.antenna.ue.phi_h
    p[_k.PHI_UV] = s.antenna.ue.phi_v
    lb = d.link
    p[_k.G_MM], p[_k.G_MS], p[_k.G_SM], p[_k.G_SS] = lb.g_mm, lb.g_ms, lb.g_sm, lb.g_ss
    p[_k.K_ABS] = lb.K
    p[_k.SIGMA2] = lb.sigma2
    p[_k.TAU] = lb.tau
    p[_k.R_T] = d.r_t
    p[_k.MAX_ASSOC] = MAX_ASSOCIATION_ATTEMPTS
    p[_k.MAX_WALL_REDRAW] = MAX_WALL_REDRAWS
    return p


def _check_x00(s: Scenario, x00: float):
    half_diag = 0.5 * math.hypot(s.network.room_length, s.network.room_width)
    if not 0.0 <= x00 <= half_diag:
        raise ValueError(f"x00 must lie in [0, {half_diag:.4g}] m (room half-diagonal)")


def _check_trials(trials: int):
    if int(trials) < 1:
        raise ValueError("trials must be >= 1")


def sample_scene(s: Scenario, x00: float, rng=0, trial: int = 0, environment="indoor") -> Scene:
    """Scene number ``trial`` of the stream seeded by ``rng`` (an int or a numpy Generator)."""
    _check_x00(s, x00)
    p = pack_parameters(s, x00, environment)
    theta, walls, humans, aps, ues, rej, redraws, ok = _k.sample_full_scene(p, _seed(rng), int(trial))
    return Scene(float(x00), float(theta), walls, humans, aps, ues, rej, int(redraws), bool(ok))


def sinr(scene: Scene, s: Scenario, environment="indoor") -> tuple[float, bool]:
    """SINR (linear) at the user and whether the serving link escapes the blockers."""
    p = pack_parameters(s, scene.x00, environment)
    value, los, _ = _k.scene_sinr(p, scene.serving_azimuth, scene.walls, scene.humans,
                                  scene.aps, scene.ues)
    return float(value), bool(los)


def coverage_outcomes(s: Scenario, x00: float, trials: int, rng=0, environment="indoor",
                      start: int = 0) -> tuple[np.ndarray, int]:
    """Per-trial coverage indicators and the number of rejected associations."""
    _check_x00(s, x00)
    _check_trials(trials)
    p = pack_parameters(s, x00, environment)
    seed = _seed(rng)
    out = np.empty(int(trials), dtype=bool)
    rejected = 0
    for lo in range(0, int(trials), _BATCH):
        n = min(_BATCH, int(trials) - lo)
        cov, rej, _ = _k.coverage_batch(p, seed, start + lo, n)
        out[lo:lo + n] = cov
        rejected += int(rej.sum())
    return out, rejected


def estimate_coverage(s: Scenario, x00: float, trials: int, rng=0, environment="indoor") -> Estimate:
    """Fraction of scenes with a blocker-free serving link and SINR >= tau."""
    hits, rejected = coverage_outcomes(s, x00, trials, rng, environment)
    return Estimate(float(hits.mean()), int(trials), rejected)


def estimate_hitting(s: Scenario, x_i0: float, trials: int, rng=0, environment="indoor",
                     r_t: float | None = None) -> Estimate:
    """Fraction of fresh interferers at distance ``x_i0`` whose main lobe covers the user."""
    _check_trials(trials)
    if not x_i0 >= 0.0:
        raise ValueError("x_i0 must be >= 0")
    env = Environment.parse(environment)
    if r_t is not None:
        s = s.replace(r_t_override=r_t)
    p = pack_parameters(s, 0.0, env)
    seed = _seed(rng)
    walled = env is Environment.TYPICAL_INDOOR
    total = 0
    rejected = 0
    for lo in range(0, int(trials), _BATCH):
        n = min(_BATCH, int(trials) - lo)
        hits, rej = _k.hitting_batch(p, float(x_i0), seed, lo, n, walled)
        total += int(hits.sum())
        rejected += int(rej.sum())
    return Estimate(total / int(trials), int(trials), rejected)


def estimate_wall_los(s: Scenario, x: float, trials: int, rng=0) -> Estimate:
    """Empirical wall-LoS probability of a random-azimuth link of horizontal length ``x``."""
    _check_trials(trials)
    b = s.blockage
    clear = _k.wall_los_batch(float(x), b.wall_density, b.wall_mean_length,
                              1.0 if b.wall_length_law == "exponential" else 0.0,
                              _seed(rng), int(trials))
    return Estimate(float(clear.mean()), int(trials))


def estimate_human_los(s: Scenario, x: float, trials: int, rng=0) -> Estimate:
    """Empirical human-LoS probability of a UE-AP link of horizontal length ``x``."""
    _check_trials(trials)
    b, net = s.blockage, s.network
    frac = (b.blocker_height - net.ue_height) / s.hbar
    clear = _k.human_los_batch(float(x), frac, b.blocker_density, b.blocker_w1, b.blocker_w2,
                               _seed(rng), int(trials))
    return Estimate(float(clear.mean()), int(trials))


__all__ = [
    "Estimate", "Scene", "sample_scene", "sinr", "estimate_coverage", "estimate_hitting",
    "estimate_wall_los", "estimate_human_los", "coverage_outcomes", "pack_parameters",
    "is_wall_blocked", "is_human_blocked", "in_self_blockage",
    "MAX_ASSOCIATION_ATTEMPTS",
]
