"""Probability that an interfering AP's main lobe illuminates the typical user.

The horizontal part is the beam's share of the full circle. The vertical part
asks whether the elevation of the interferer's own UE falls within half a
vertical beamwidth of the elevation towards the typical user; it is obtained
from the distribution of the AP-to-own-UE horizontal distance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .scenario import Scenario, association_normalizer, derive_constants, vertical_window_edges


class Environment(str, enum.Enum):
    TYPICAL_INDOOR = "indoor"
    OPEN_OFFICE = "open-office"

    @classmethod
    def parse(cls, value: "str | Environment") -> "Environment":
        if isinstance(value, cls):
            return value
        v = str(value).lower().replace("_", "-")
        aliases = {"indoor": cls.TYPICAL_INDOOR, "typical-indoor": cls.TYPICAL_INDOOR,
                   "open-office": cls.OPEN_OFFICE, "open": cls.OPEN_OFFICE, "oo": cls.OPEN_OFFICE}
        if v not in aliases:
            raise ValueError(f"unknown environment {value!r}")
        return aliases[v]


# branch labels shared by the closed form and the quadrature oracle
RISING, FALLING, DARK = 1, 2, 3


def hitting_prob_horizontal(phi_ah: float) -> float:
    return phi_ah / (2.0 * math.pi)


@dataclass(frozen=True)
class HittingModel:
    phi_ah: float
    phi_av: float
    hbar: float
    r_t: float
    eta_w: float = 0.0
    environment: Environment = Environment.TYPICAL_INDOOR

    def __post_init__(self):
        object.__setattr__(self, "environment", Environment.parse(self.environment))
        if self.environment is Environment.OPEN_OFFICE:
            object.__setattr__(self, "eta_w", 0.0)
        if not (self.hbar > 0.0 and self.r_t > 0.0):
            raise ValueError("hbar and R_T must be positive")
        if not 0.0 < self.phi_av <= math.pi:
            raise ValueError("vertical beamwidth must lie in (0, pi]")
        psi_bar, x_mu, x_nu = vertical_window_edges(self.hbar, self.r_t, self.phi_av)
        object.__setattr__(self, "psi_bar", psi_bar)
        object.__setattr__(self, "x_mu", x_mu)
        object.__setattr__(self, "x_nu", x_nu)
        object.__setattr__(self, "rho", association_normalizer(self.eta_w, self.r_t))
        # below this distance the window's upper edge passes the zenith
        object.__setattr__(self, "x_zenith", self.hbar * math.tan(min(self.phi_av / 2.0, math.pi / 2.0))
                           if self.phi_av < math.pi else math.inf)

    @classmethod
    def from_scenario(cls, s: Scenario, environment="indoor") -> "HittingModel":
        env = Environment.parse(environment)
        d = derive_constants(s)
        return cls(
            phi_ah=s.antenna.ap.phi_h, phi_av=s.antenna.ap.phi_v, hbar=d.hbar, r_t=d.r_t,
            eta_w=d.eta_w if env is Environment.TYPICAL_INDOOR else 0.0, environment=env,
        )

    # -- association distance ------------------------------------------------

    def assoc_cdf(self, t):
        """P(own-UE horizontal distance <= t), vectorized."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.r_t)
        z = self.eta_w * t
        with np.errstate(invalid="ignore", divide="ignore"):
            big = (-np.expm1(-z) - z * np.exp(-z)) / np.where(z > 0.0, z * z, 1.0)
        small = 0.5 - z / 3.0 + z * z / 8.0 - z ** 3 / 30.0
        phi2 = np.where(z < 1e-3, small, big)
        out = np.minimum(self.rho * t * t * phi2, 1.0)
        return float(out) if out.ndim == 0 else out

    # -- branch selector -----------------------------------------------------

    def branch(self, x):
        """1 on ``[0, x_mu]``, 2 on ``(x_mu, x_nu)``, 3 on ``[x_nu, inf)``."""
        x = np.asarray(x, dtype=float)
        b = np.where(x <= self.x_mu, RISING, np.where(x < self.x_nu, FALLING, DARK))
        return int(b) if b.ndim == 0 else b

    def window_limits(self, x):
        """Own-UE distance interval ``[lo, hi]`` that puts the user in the vertical beam."""
        x = np.asarray(x, dtype=float)
        psi = np.arctan2(self.hbar, x)
        half = self.phi_av / 2.0
        top = psi + half
        bottom = psi - half
        with np.errstate(divide="ignore"):
            lo = np.where(top >= math.pi / 2.0, 0.0, self.hbar / np.tan(np.minimum(top, math.pi / 2.0)))
            hi_raw = np.where(bottom <= 0.0, np.inf, self.hbar / np.tan(np.maximum(bottom, 1e-300)))
        br = self.branch(x)
        hi = np.where(br == RISING, np.minimum(hi_raw, self.r_t), self.r_t)
        lo = np.maximum(lo, 0.0)
        return lo, hi, br

    def vertical(self, x):
        lo, hi, br = self.window_limits(x)
        val = np.where((br == DARK) | (hi <= lo), 0.0,
                       np.asarray(self.assoc_cdf(hi)) - np.asarray(self.assoc_cdf(np.minimum(lo, hi))))
        val = np.clip(val, 0.0, 1.0)
        return float(val) if np.ndim(val) == 0 else val

    def elevation_pdf(self, psi):
        psi = np.asarray(psi, dtype=float)
        inside = (psi >= self.psi_bar) & (psi <= math.pi / 2.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            cot = np.cos(psi) / np.sin(psi)
            dens = self.rho * self.hbar ** 2 * cot / np.sin(psi) ** 2 * np.exp(-self.eta_w * self.hbar * cot)
        out = np.where(inside, dens, 0.0)
        return float(out) if out.ndim == 0 else out


def hitting_prob_vertical(x_i0, m: HittingModel):
    return m.vertical(x_i0)


def hitting_prob(x_i0, m: HittingModel):
    return hitting_prob_horizontal(m.phi_ah) * np.asarray(m.vertical(x_i0)) if np.ndim(x_i0) \
        else hitting_prob_horizontal(m.phi_ah) * m.vertical(x_i0)


def elevation_pdf(psi, m: HittingModel):
    return m.elevation_pdf(psi)
