"""Pyramidal-plus-sphere sectored antenna: solid angles, gains, beam tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FOUR_PI = 4.0 * math.pi


def main_lobe_solid_angle(phi_h: float, phi_v: float) -> float:
    """Solid angle (sr) of a rectangular pyramidal beam with the given full beamwidths."""
    if not (0.0 < phi_h < math.pi and 0.0 < phi_v < math.pi):
        raise ValueError("beamwidths must lie in (0, pi)")
    arg = math.tan(phi_h / 2.0) * math.tan(phi_v / 2.0)
    if arg > 1.0:
        if arg > 1.0 + 1e-12:
            raise ValueError(
                f"tan(phi_h/2)*tan(phi_v/2) = {arg:.6g} exceeds 1; beam wider than a hemisphere"
            )
        arg = 1.0
    return 4.0 * math.asin(arg)


def sectored_gains(k: float, omega_main: float) -> tuple[float, float]:
    """Main- and side-lobe linear gains for side-lobe power ratio ``k``.

    The split conserves total radiated power:
    ``G_m * omega_main + G_s * (4 pi - omega_main) = 4 pi``.
    """
    if not 0.0 < k < 1.0:
        raise ValueError("side-lobe ratio k must lie in (0, 1)")
    if not 0.0 < omega_main < FOUR_PI:
        raise ValueError("main-lobe solid angle must lie in (0, 4 pi)")
    g_main = FOUR_PI / ((k + 1.0) * omega_main)
    g_side = FOUR_PI * k / ((k + 1.0) * (FOUR_PI - omega_main))
    return g_main, g_side


def implied_solid_angle(k: float, g_main: float) -> float:
    """Main-lobe solid angle that produces ``g_main`` for ratio ``k``."""
    return FOUR_PI / ((k + 1.0) * g_main)


def implied_beamwidth(k: float, g_main: float) -> float:
    """Equal horizontal/vertical beamwidth whose pyramid yields ``g_main``."""
    omega = implied_solid_angle(k, g_main)
    if not 0.0 < omega <= 2.0 * math.pi:
        raise ValueError(f"gain {g_main:.4g} with k={k} implies a beam wider than a hemisphere")
    return 2.0 * math.atan(math.sqrt(math.sin(omega / 4.0)))


@dataclass(frozen=True)
class AntennaPattern:
    phi_h: float
    phi_v: float
    k: float
    omega_main: float
    omega_side: float
    g_main: float
    g_side: float

    @classmethod
    def from_beamwidths(cls, phi_h: float, phi_v: float, k: float,
                        g_main: float | None = None, g_side: float | None = None) -> "AntennaPattern":
        """Build a pattern; explicit gains override the power-conserving values."""
        omega_m = main_lobe_solid_angle(phi_h, phi_v)
        gm, gs = sectored_gains(k, omega_m)
        return cls(
            phi_h=phi_h,
            phi_v=phi_v,
            k=k,
            omega_main=omega_m,
            omega_side=FOUR_PI - omega_m,
            g_main=gm if g_main is None else g_main,
            g_side=gs if g_side is None else g_side,
        )

    @property
    def power_balance(self) -> float:
        """``(G_m Omega_m + G_s Omega_s) / 4 pi``; exactly 1 unless gains were overridden."""
        return (self.g_main * self.omega_main + self.g_side * self.omega_side) / FOUR_PI


@dataclass(frozen=True)
class Boresight:
    """Pointing direction: azimuth in [0, 2 pi), elevation in [-pi/2, pi/2]."""

    azimuth: float
    elevation: float

    def __post_init__(self):
        if not -math.pi / 2 <= self.elevation <= math.pi / 2:
            raise ValueError("elevation must lie in [-pi/2, pi/2]")
        object.__setattr__(self, "azimuth", self.azimuth % (2.0 * math.pi))


def wrap_angle(a):
    """Map angle differences into (-pi, pi]. Works on scalars and arrays."""
    a = np.asarray(a, dtype=float)
    w = np.mod(a + math.pi, 2.0 * math.pi) - math.pi
    w = np.where(w <= -math.pi, math.pi, w)
    # values already in range pass through untouched (keeps boundary tests exact)
    w = np.where((a > -math.pi) & (a <= math.pi), a, w)
    return float(w) if np.ndim(w) == 0 else w


def in_main_lobe(d_azimuth, d_elevation, phi_h: float, phi_v: float):
    """Inclusive containment test on azimuth/elevation offsets from boresight."""
    return (np.abs(wrap_angle(d_azimuth)) <= phi_h / 2.0) & (np.abs(d_elevation) <= phi_v / 2.0)


def gain_towards(pattern: AntennaPattern, boresight: Boresight, direction: Boresight) -> float:
    main = in_main_lobe(direction.azimuth - boresight.azimuth,
                        direction.elevation - boresight.elevation,
                        pattern.phi_h, pattern.phi_v)
    return pattern.g_main if bool(main) else pattern.g_side
