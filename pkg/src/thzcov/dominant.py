"""Dominant-interferer regions around the typical user and their mean populations.

An interferer is *dominant* when it alone pushes the SINR below threshold.
Whether it can depends on which lobes face each other, so the plane around
the user is cut into annuli by the four dominant distances and by the radial
extent of the user's own main lobe. *Near* dominant interferers cause outage
even through the AP side lobe; *far* ones only when the AP main lobe hits the
user, which brings in the hitting probability.

Region naming: ``d_xy`` below uses ``x`` for the user's lobe and ``y`` for the
interfering AP's lobe (the reverse of :func:`propagation.dominant_distance`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hitting import Environment, HittingModel
from .propagation import dominant_distance
from .scenario import DerivedParams, Scenario, derive_constants
from .specfun import QuadratureSpec, exp_moment, expint_ei, integrate

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RegionBounds:
    """Radial extent ``[x_low, x_high]`` of the user's vertical main lobe at AP height."""

    x_low: float
    x_high: float
    psi00: float


def region_bounds(x00: float, phi_uv: float, hbar: float) -> RegionBounds:
    if x00 < 0.0:
        raise ValueError("x00 must be >= 0")
    psi00 = math.atan2(hbar, x00)
    t = math.tan(phi_uv / 2.0)
    if psi00 <= (math.pi - phi_uv) / 2.0:
        x_low = hbar * (x00 - hbar * t) / (hbar + x00 * t)
    else:
        x_low = 0.0
    if psi00 >= phi_uv / 2.0:
        denom = hbar - x00 * t
        x_high = hbar * (x00 + hbar * t) / denom if denom > 0.0 else math.inf
    else:
        x_high = math.inf
    return RegionBounds(max(x_low, 0.0), x_high, psi00)


@dataclass(frozen=True)
class DominantRegions:
    """Dominant distances and region thresholds for one serving distance.

    ``d_mm .. d_ss`` follow the region naming (user lobe first). ``v_*`` are
    the clipped radii that delimit the near/far annuli. ``infeasible`` is set
    when the serving link alone misses the threshold; every distance is then
    infinite and coverage is zero.
    """

    x00: float
    bounds: RegionBounds
    d_mm: float
    d_ms: float
    d_sm: float
    d_ss: float
    v_mm: float
    v_ms: float
    v_sm1: float
    v_sm2: float
    v_ss1: float
    v_ss2: float
    main_width: float
    side_width: float

    @property
    def infeasible(self) -> bool:
        return math.isinf(self.d_mm)


def _regions(x00: float, s: Scenario, d: DerivedParams) -> DominantRegions:
    rb = region_bounds(x00, s.antenna.ue.phi_v, d.hbar)
    lb = d.link
    d_mm = dominant_distance(x00, "m", "m", lb, d.hbar)
    d_ms = dominant_distance(x00, "s", "m", lb, d.hbar)   # user main, AP side
    d_sm = dominant_distance(x00, "m", "s", lb, d.hbar)   # user side, AP main
    d_ss = dominant_distance(x00, "s", "s", lb, d.hbar)
    lo, hi = rb.x_low, rb.x_high
    phi_uh = s.antenna.ue.phi_h
    return DominantRegions(
        x00=x00, bounds=rb, d_mm=d_mm, d_ms=d_ms, d_sm=d_sm, d_ss=d_ss,
        v_mm=min(hi, d_mm),
        v_ms=max(lo, min(hi, d_ms)),
        v_sm1=min(lo, d_sm),
        v_sm2=max(hi, d_sm),
        v_ss1=min(lo, d_ss),
        v_ss2=max(hi, d_ss),
        main_width=phi_uh,
        side_width=TWO_PI - phi_uh - s.blockage.self_block_angle,
    )


def dominant_regions(x00: float, s: Scenario, derived: DerivedParams | None = None) -> DominantRegions:
    return _regions(x00, s, derived or derive_constants(s))


# ---------------------------------------------------------------------------
# near interferers
# ---------------------------------------------------------------------------

def _near_count(r: DominantRegions, density: float, zeta: float, eta: float) -> float:
    if density == 0.0:
        return 0.0
    if r.infeasible:
        return math.inf
    lo, hi = r.bounds.x_low, r.bounds.x_high
    main = exp_moment(0.0, r.v_ss1, eta) + exp_moment(lo, r.v_ms, eta) + exp_moment(hi, r.v_ss2, eta)
    side = exp_moment(0.0, r.d_ss, eta)
    return density * zeta * (r.main_width * main + r.side_width * side)


def lambda_near(x00: float, s: Scenario, derived: DerivedParams | None = None) -> float:
    """Mean number of LoS interferers that cause outage through any lobe pairing."""
    d = derived or derive_constants(s)
    return _near_count(_regions(x00, s, d), s.network.ap_density, d.zeta, d.eta)


def lambda_near_open_office(x00: float, s: Scenario) -> float:
    d = derive_constants(s)
    return _near_count(_regions(x00, s, d), s.network.ap_density, d.zeta, d.eta_b)


# ---------------------------------------------------------------------------
# far interferers
# ---------------------------------------------------------------------------

_QUAD = QuadratureSpec(rel_tol=1e-12, max_subdivisions=4000)


def _tail_cutoff(a: float, eta: float) -> float:
    # x e^{-eta x} beyond this point is below 1e-18 of its peak mass
    return max(a, 1.0 / eta) + 60.0 / eta


def _digamma_quad(a: float, b: float, m: HittingModel, eta: float, spec: QuadratureSpec = _QUAD) -> float:
    if not 0.0 <= a <= b:
        raise ValueError("requires 0 <= a <= b")
    b = min(b, m.x_nu)
    if b <= a:
        return 0.0
    if math.isinf(b):
        if eta == 0.0:
            return math.inf
        b = _tail_cutoff(a, eta)

    def f(x):
        return m.vertical(x) * np.exp(-eta * x) * x

    return integrate(f, a, b, spec.with_breakpoints([m.x_zenith, m.x_mu]))


def _far_count(r: DominantRegions, density: float, zeta: float, phi_ah: float, fdg) -> float:
    if density == 0.0 or phi_ah == 0.0:
        return 0.0
    if r.infeasible:
        return math.inf
    main = fdg(r.v_ss1, r.v_sm1) + fdg(r.v_ms, max(r.v_ms, r.v_mm)) + fdg(r.v_ss2, r.v_sm2)
    side = fdg(r.d_ss, r.d_sm)
    return density * zeta * phi_ah / TWO_PI * (r.main_width * main + r.side_width * side)


def digamma_integral(a: float, b: float, s: Scenario, environment="indoor") -> float:
    """``int_a^b p_vertical(x) p(x) x dx`` by quadrature, ``p`` the interferer LoS decay."""
    env = Environment.parse(environment)
    d = derive_constants(s)
    m = HittingModel.from_scenario(s, env)
    eta = d.eta if env is Environment.TYPICAL_INDOOR else d.eta_b
    return _digamma_quad(a, b, m, eta)


def lambda_far(x00: float, s: Scenario, derived: DerivedParams | None = None) -> float:
    """Mean number of LoS interferers that cause outage only when their main lobe hits."""
    d = derived or derive_constants(s)
    m = HittingModel(s.antenna.ap.phi_h, s.antenna.ap.phi_v, d.hbar, d.r_t, d.eta_w)
    return _far_count(_regions(x00, s, d), s.network.ap_density, d.zeta, s.antenna.ap.phi_h,
                      lambda a, b: _digamma_quad(a, b, m, d.eta))


# ---------------------------------------------------------------------------
# open office: closed-form far integral
# ---------------------------------------------------------------------------

class _OpenOfficePrimitives:
    """Antiderivatives of the open-office far integrand.

    ``upper(x)`` integrates ``(hbar/R)^2 cot^2(psi(x) + phi/2) e^{-eta x} x`` and
    ``lower(x)`` the same with ``psi(x) - phi/2``; ``plain(x)`` integrates
    ``e^{-eta x} x``. Additive constants are dropped.
    """

    def __init__(self, hbar: float, r_t: float, phi_av: float, eta: float):
        self.h = hbar
        self.r = r_t
        self.eta = eta
        half = phi_av / 2.0
        self.c = math.cos(half) / math.sin(half)
        self.cs = 1.0 / math.sin(half)
        self.cos_half = math.cos(half)
        self.sin_half = math.sin(half)
        self.sin_full = math.sin(phi_av)
        self.cos_full = math.cos(phi_av)
        self.sin_3half = math.sin(3.0 * half)

    def plain(self, x: float) -> float:
        eta = self.eta
        if eta == 0.0:
            return x * x / 2.0
        if math.isinf(x):
            return 0.0
        return -(1.0 + eta * x) * math.exp(-eta * x) / (eta * eta)

    def _i1(self, x: float, sign: float) -> float:
        h, c, cs, eta = self.h, self.c, self.cs, self.eta
        scale = h * h / (self.r * self.r)
        if eta != 0.0:
            if math.isinf(x):
                return 0.0
            shift = x + sign * h * c
            term1 = 2.0 * math.exp(-eta * x) * c * (
                -(1.0 + eta * x) * c / eta ** 2
                + sign * 2.0 * h * cs ** 2 / eta
                + sign * h ** 3 * cs ** 4 / shift
            )
            ei = expint_ei(-eta * shift)
            term2 = (h * h * math.exp(sign * eta * h * c) * cs ** 5 * ei
                     * (sign * 2.0 * eta * h * self.cos_half + 3.0 * self.sin_half + self.sin_3half))
            return scale / 2.0 * (term1 + term2)
        if math.isinf(x):
            raise ValueError("open-office integral diverges without blockage decay")
        return scale * (
            0.5 * c * c * x * x
            - sign * h * cs ** 4 * self.sin_full * x
            + sign * h ** 3 * cs ** 6 * self.sin_full / (2.0 * (x + sign * h * c))
            + h * h * (2.0 + self.cos_full) * cs ** 4 * math.log(h * self.cos_half + sign * x * self.sin_half)
        )

    def upper(self, x: float) -> float:
        return self._i1(x, +1.0)

    def lower(self, x: float) -> float:
        return self._i1(x, -1.0)


def _digamma_open_office(a: float, b: float, m: HittingModel, eta: float) -> float:
    if not 0.0 <= a <= b:
        raise ValueError("requires 0 <= a <= b")
    x_mu, x_nu = m.x_mu, m.x_nu
    if a >= x_nu or a == b:
        return 0.0
    p = _OpenOfficePrimitives(m.hbar, m.r_t, m.phi_av, eta)
    # the upper-edge term is absent while the beam window still contains the zenith
    xz = m.x_zenith

    def up(t):
        return p.upper(max(t, xz))

    b_eff = min(b, x_nu)
    total = 0.0
    if a <= x_mu:
        top = min(b_eff, x_mu)
        total += p.lower(top) - p.lower(a)
        if b_eff > x_mu:
            total += p.plain(b_eff) - p.plain(x_mu)
    else:
        total += p.plain(b_eff) - p.plain(a)
    total += up(a) - up(b_eff)
    return total


def digamma_open_office(a: float, b: float, s: Scenario) -> float:
    d = derive_constants(s)
    m = HittingModel.from_scenario(s, Environment.OPEN_OFFICE)
    return _digamma_open_office(a, b, m, d.eta_b)


def lambda_far_open_office(x00: float, s: Scenario) -> float:
    d = derive_constants(s)
    m = HittingModel.from_scenario(s, Environment.OPEN_OFFICE)
    return _far_count(_regions(x00, s, d), s.network.ap_density, d.zeta, s.antenna.ap.phi_h,
                      lambda a, b: _digamma_open_office(a, b, m, d.eta_b))
