"""THz link budget: spreading plus molecular absorption, LoS rays only.

Lobe pairs are written ``(kappa, iota)`` with ``kappa`` the AP lobe and
``iota`` the UE lobe, each ``"m"`` (main) or ``"s"`` (side).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .specfun import lambert_w0

SPEED_OF_LIGHT = 299_792_458.0

Lobe = Literal["m", "s"]
LOBE_PAIRS: tuple[tuple[str, str], ...] = (("m", "m"), ("m", "s"), ("s", "m"), ("s", "s"))


class InfeasibleLinkError(ValueError):
    """Even a zenith link cannot reach the SINR threshold."""


def gain_factor(tx_power: float, g_ap: float, g_ue: float, frequency: float) -> float:
    """``P_T G_A G_U (c / 4 pi f)^2`` in W m^2."""
    return tx_power * g_ap * g_ue * (SPEED_OF_LIGHT / (4.0 * math.pi * frequency)) ** 2


@dataclass(frozen=True)
class LinkBudget:
    g_mm: float
    g_ms: float
    g_sm: float
    g_ss: float
    K: float
    sigma2: float
    tau: float

    @classmethod
    def from_gains(cls, tx_power: float, frequency: float, g_ap_main: float, g_ap_side: float,
                   g_ue_main: float, g_ue_side: float, K: float, sigma2: float,
                   tau: float) -> "LinkBudget":
        return cls(
            g_mm=gain_factor(tx_power, g_ap_main, g_ue_main, frequency),
            g_ms=gain_factor(tx_power, g_ap_main, g_ue_side, frequency),
            g_sm=gain_factor(tx_power, g_ap_side, g_ue_main, frequency),
            g_ss=gain_factor(tx_power, g_ap_side, g_ue_side, frequency),
            K=K,
            sigma2=sigma2,
            tau=tau,
        )

    def g(self, kappa: Lobe, iota: Lobe) -> float:
        return getattr(self, f"g_{kappa}{iota}")


def received_power(x, kappa: Lobe, iota: Lobe, lb: LinkBudget, hbar: float):
    """Received power (W) at horizontal distance ``x``; accepts scalars or arrays."""
    x = np.asarray(x, dtype=float)
    d = np.sqrt(hbar * hbar + x * x)
    p = lb.g(kappa, iota) * np.exp(-lb.K * d) / (d * d)
    return float(p) if p.ndim == 0 else p


def _distance_for_power(g: float, target: float, K: float) -> float:
    """3D distance d solving ``g d^-2 exp(-K d) = target``."""
    if K == 0.0:
        return math.sqrt(g / target)
    return 2.0 / K * lambert_w0(K / 2.0 * math.sqrt(g / target))


def max_association_radius(lb: LinkBudget, hbar: float) -> float:
    """Horizontal distance at which the blockage-free SNR of a main-main link equals tau."""
    target = lb.sigma2 * lb.tau
    if not target < math.inf:
        raise InfeasibleLinkError("noise power is infinite")
    d = _distance_for_power(lb.g_mm, target, lb.K)
    arg = d * d - hbar * hbar
    if not arg > 0.0:
        raise InfeasibleLinkError(
            f"zenith SNR below threshold: g_mm/(sigma2 tau) = {lb.g_mm / target:.4g} m^2, "
            f"needs > hbar^2 exp(K hbar) = {hbar * hbar * math.exp(lb.K * hbar):.4g} m^2"
        )
    return math.sqrt(arg)


def dominant_distance(x00: float, kappa: Lobe, iota: Lobe, lb: LinkBudget, hbar: float) -> float:
    """Largest horizontal distance at which one (kappa, iota) interferer alone causes outage.

    Returns ``math.inf`` when the desired signal is already below ``tau * sigma2``
    (outage without interference) and ``0.0`` when even an interferer at zero
    horizontal distance is too weak.
    """
    p_serving = received_power(x00, "m", "m", lb, hbar)
    budget = p_serving - lb.tau * lb.sigma2
    if not budget > 0.0:
        return math.inf
    g = lb.g(kappa, iota)
    if g <= 0.0:
        return 0.0
    d = _distance_for_power(g, budget / lb.tau, lb.K)
    arg = d * d - hbar * hbar
    if arg <= 0.0:
        return 0.0
    return math.sqrt(arg)
