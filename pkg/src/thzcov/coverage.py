"""Coverage probability assembly, the 2D baseline, and parameter sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .antenna import FOUR_PI, main_lobe_solid_angle
from .dominant import (_digamma_open_office, _digamma_quad, _far_count, _near_count, _regions)
from .hitting import Environment, HittingModel
from .scenario import ConfigError, Scenario, db_to_linear, derive_constants
from .specfun import exp_moment


@dataclass(frozen=True)
class CoverageResult:
    x00: float
    p_c: float
    p_c_los: float
    lambda_near: float
    lambda_far: float
    environment: str

    @property
    def p_los_serving(self) -> float:
        return self.p_c / self.p_c_los if self.p_c_los > 0.0 else math.nan


def _assemble(x00, p_los_serving, lam_n, lam_f, env) -> CoverageResult:
    total = lam_n + lam_f
    p_c_los = 0.0 if math.isinf(total) else math.exp(-total)
    return CoverageResult(x00, p_los_serving * p_c_los, p_c_los, lam_n, lam_f, env)


def coverage(x00: float, s: Scenario) -> CoverageResult:
    """Typical-indoor coverage: serving human-LoS times the dominant-interferer void probability."""
    d = derive_constants(s)
    r = _regions(x00, s, d)
    lam = s.network.ap_density
    m = HittingModel(s.antenna.ap.phi_h, s.antenna.ap.phi_v, d.hbar, d.r_t, d.eta_w)
    lam_n = _near_count(r, lam, d.zeta, d.eta)
    lam_f = _far_count(r, lam, d.zeta, s.antenna.ap.phi_h, lambda a, b: _digamma_quad(a, b, m, d.eta))
    return _assemble(x00, d.zeta * math.exp(-d.eta_b * x00), lam_n, lam_f,
                     Environment.TYPICAL_INDOOR.value)


def coverage_open_office(x00: float, s: Scenario) -> CoverageResult:
    """Human blockers only; the far count uses the exponential-integral closed form."""
    d = derive_constants(s.without_walls())
    r = _regions(x00, s, d)
    lam = s.network.ap_density
    m = HittingModel(s.antenna.ap.phi_h, s.antenna.ap.phi_v, d.hbar, d.r_t, 0.0,
                     Environment.OPEN_OFFICE)
    lam_n = _near_count(r, lam, d.zeta, d.eta_b)
    lam_f = _far_count(r, lam, d.zeta, s.antenna.ap.phi_h,
                       lambda a, b: _digamma_open_office(a, b, m, d.eta_b))
    return _assemble(x00, d.zeta * math.exp(-d.eta_b * x00), lam_n, lam_f,
                     Environment.OPEN_OFFICE.value)


def flat_human_decay(s: Scenario) -> float:
    """Human decay rate when every blocker is treated as tall enough to cut the whole link."""
    b = s.blockage
    return 2.0 * (b.blocker_w1 + b.blocker_w2) * b.blocker_density / math.pi


def coverage_2d_baseline(x00: float, s: Scenario, r_b: float | None = None,
                         environment="indoor") -> CoverageResult:
    """Heights ignored: blockage acts on ``x + r_B`` and every main lobe is vertically aligned."""
    env = Environment.parse(environment)
    r_b = s.r_b if r_b is None else r_b
    if r_b < 0.0:
        raise ValueError("r_B must be >= 0")
    if env is Environment.OPEN_OFFICE:
        s = s.without_walls()
    d = derive_constants(s)
    r = _regions(x00, s, d)
    eta_h = flat_human_decay(s)
    zeta = d.zeta * math.exp(-eta_h * r_b)
    eta = eta_h + d.eta_w
    lam = s.network.ap_density
    lam_n = _near_count(r, lam, zeta, eta)
    lam_f = _far_count(r, lam, zeta, s.antenna.ap.phi_h, lambda a, b: exp_moment(a, b, eta))
    return _assemble(x00, zeta * math.exp(-eta_h * x00), lam_n, lam_f, f"2d-{env.value}")


def evaluate(x00: float, s: Scenario, environment="indoor") -> CoverageResult:
    env = Environment.parse(environment)
    if env is Environment.OPEN_OFFICE:
        return coverage_open_office(x00, s)
    return coverage(x00, s)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

SWEEP_VARIABLES = ("x00", "tau_db", "f_thz", "lambda_a", "lambda_b", "gain_split_db")


def _rescaled_beam(ant, factor: float) -> tuple[float, float, float]:
    """Beamwidths whose pyramid solid angle is the configured one divided by ``factor``.

    Both half-angle tangents are scaled alike, which keeps the beam's aspect.
    Returns ``(phi_h, phi_v, omega)``.
    """
    omega0 = main_lobe_solid_angle(ant.phi_h, ant.phi_v)
    omega = omega0 / factor
    if not 0.0 < omega <= 2.0 * math.pi:
        raise ConfigError(f"gain shift leaves a main lobe of {omega:.4g} sr, wider than a hemisphere")
    scale = math.sqrt(math.sin(omega / 4.0) / math.sin(omega0 / 4.0))
    phi_h = 2.0 * math.atan(scale * math.tan(ant.phi_h / 2.0))
    phi_v = 2.0 * math.atan(scale * math.tan(ant.phi_v / 2.0))
    if not (phi_h < math.pi and phi_v < math.pi):
        raise ConfigError("gain shift widens a beam past pi")
    return phi_h, phi_v, omega


def shift_main_gain(s: Scenario, delta_db: float) -> Scenario:
    """Move ``delta_db`` of main-lobe gain from the UE to the AP, keeping their product.

    A higher main-lobe gain means a proportionally smaller main-lobe solid angle,
    so both beams are rescaled (aspect kept) to match their new gains. Side lobes
    that were configured explicitly are kept; otherwise they follow from ``k``
    and the new solid angle.
    """
    factor = db_to_linear(delta_db)
    changes = {}
    for side, ant, f in (("ap", s.antenna.ap, factor), ("ue", s.antenna.ue, 1.0 / factor)):
        phi_h, phi_v, omega = _rescaled_beam(ant, f)
        g_main = ant.pattern().g_main * f
        g_side = ant.g_side
        if g_side is None:
            g_side = FOUR_PI * ant.k / ((ant.k + 1.0) * (FOUR_PI - omega))
        changes.update({f"{side}.phi_h": phi_h, f"{side}.phi_v": phi_v,
                        f"{side}.g_main": g_main, f"{side}.g_side": g_side})
    return s.replace(**changes)


def apply_sweep_value(s: Scenario, variable: str, value: float, x00: float) -> tuple[Scenario, float]:
    """Scenario and serving distance for one sweep point."""
    if variable == "x00":
        return s, value
    if variable == "tau_db":
        return s.replace(**{"propagation.sinr_threshold": db_to_linear(value)}), x00
    if variable == "f_thz":
        if s.propagation.k_table is None:
            raise ConfigError("frequency sweeps need an absorption table (k_abs_table)")
        return s.replace(**{"propagation.frequency": value * 1e12}), x00
    if variable == "lambda_a":
        return s.replace(**{"network.ap_density": value}), x00
    if variable == "lambda_b":
        return s.replace(**{"blockage.blocker_density": value}), x00
    if variable == "gain_split_db":
        return shift_main_gain(s, value), x00
    raise ConfigError(f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}")


@dataclass(frozen=True)
class CurvePoint:
    value: float
    analytic: CoverageResult
    mc_mean: float = math.nan
    mc_half_width: float = math.nan


@dataclass(frozen=True)
class Curve:
    variable: str
    points: tuple[CurvePoint, ...]

    @property
    def values(self) -> list[float]:
        return [p.value for p in self.points]

    @property
    def p_c(self) -> list[float]:
        return [p.analytic.p_c for p in self.points]


def sweep(variable: str, grid: Sequence[float], s: Scenario, x00: float = 6.0,
          environment="indoor", estimator: Callable[[Scenario, float], tuple[float, float]] | None = None
          ) -> Curve:
    """Analytic coverage over a grid; ``estimator(s, x00) -> (mean, half_width)`` adds MC columns."""
    if len(grid) == 0:
        raise ValueError("sweep grid is empty")
    pts = []
    for v in sorted(float(g) for g in grid):
        sv, xv = apply_sweep_value(s, variable, v, x00)
        res = evaluate(xv, sv, environment)
        if estimator is not None:
            mean, hw = estimator(sv, xv)
            pts.append(CurvePoint(v, res, mean, hw))
        else:
            pts.append(CurvePoint(v, res))
    return Curve(variable, tuple(pts))


__all__ = [
    "CoverageResult", "coverage", "coverage_open_office", "coverage_2d_baseline", "evaluate",
    "shift_main_gain", "apply_sweep_value", "sweep", "Curve", "CurvePoint", "SWEEP_VARIABLES",
    "flat_human_decay",
]
