"""LoS probabilities under human and wall blockage, and the association-distance density."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import Scenario, association_normalizer, derive_constants


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class LosModel:
    """Blockage constants for one scenario.

    Attributes:
        zeta: zero-length human LoS factor.
        eta_b, eta_w: human and wall decay rates (1/m).
        rho: normalizer of the association-distance density.
        r_t: association radius (m).
        w1w2_lambda: mean number of blockers covering a point, ``w1 w2 lambda_B``.
        human_slope: ``(2/pi)(w1 + w2) lambda_B (h_B - h_U) / hbar``.
        wall_rate: ``lambda_W E[L_W]``; the orientation-averaged decay is ``(2/pi)`` of it.
    """

    zeta: float
    eta_b: float
    eta_w: float
    rho: float
    r_t: float
    w1w2_lambda: float
    human_slope: float
    wall_rate: float

    @property
    def eta(self) -> float:
        return self.eta_b + self.eta_w

    @classmethod
    def from_scenario(cls, s: Scenario) -> "LosModel":
        d = derive_constants(s)
        b = s.blockage
        return cls(
            zeta=d.zeta, eta_b=d.eta_b, eta_w=d.eta_w, rho=d.rho, r_t=d.r_t,
            w1w2_lambda=b.blocker_w1 * b.blocker_w2 * b.blocker_density,
            human_slope=d.eta_b,
            wall_rate=b.wall_density * b.wall_mean_length,
        )

    def p_los_human(self, x):
        x = np.asarray(x, dtype=float)
        return _out(self.zeta * np.exp(-self.eta_b * x))

    def mean_intersecting_humans(self, x):
        """Expected number of blockers whose shadow cuts a link of horizontal length ``x``."""
        x = np.asarray(x, dtype=float)
        return _out(self.w1w2_lambda + self.human_slope * x)

    def p_los_wall(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.exp(-self.eta_w * x))

    def p_los(self, x):
        x = np.asarray(x, dtype=float)
        return _out(self.zeta * np.exp(-self.eta * x))

    def assoc_distance_pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= self.r_t)
        return _out(np.where(inside, self.rho * x * np.exp(-self.eta_w * x), 0.0))

    def with_eta_w(self, eta_w: float) -> "LosModel":
        """Same model with a different wall decay (``rho`` recomputed)."""
        return LosModel(self.zeta, self.eta_b, eta_w, association_normalizer(eta_w, self.r_t),
                        self.r_t, self.w1w2_lambda, self.human_slope, eta_w * math.pi / 2.0)


def p_los_wall_at_azimuth(x, azimuth, wall_rate: float):
    """Wall LoS for a link of fixed azimuth with binary (0 or pi/2) wall orientation.

    ``wall_rate`` is ``lambda_W E[L_W]``. Averaging over a uniform azimuth gives
    the ``exp(-(2/pi) wall_rate x)`` form to first order only, which is why the
    simulator checks compare against this exact per-azimuth expression.
    """
    x = np.asarray(x, dtype=float)
    xi = 0.5 * (np.abs(np.sin(azimuth)) + np.abs(np.cos(azimuth)))
    return _out(np.exp(-wall_rate * xi * x))
