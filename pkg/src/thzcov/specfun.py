"""Special functions and adaptive quadrature used by the closed forms.

Everything here is scalar-oriented and dependency-light: the Lambert W
function (principal branch), the exponential integral Ei, and a composite
Gauss-Legendre integrator that splits at caller-supplied breakpoints.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_INV_E = math.exp(-1.0)


class SpecialFunctionError(ValueError):
    """Argument outside the domain of a special function."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------

def lambert_w0(x: float) -> float:
    """Principal branch W0 of the Lambert W function for real ``x >= -1/e``.

    Halley iteration from a log-asymptotic (large ``x``) or branch-point
    series (``x`` near ``-1/e``) starting guess.
    """
    x = float(x)
    if math.isnan(x):
        raise SpecialFunctionError("lambert_w0: NaN argument")
    if x < -_INV_E:
        # tolerate round-off right at the branch point
        if x < -_INV_E * (1.0 + 1e-15):
            raise SpecialFunctionError(f"lambert_w0: x = {x!r} < -1/e")
        return -1.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf

    if x < -0.25:
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    elif x <= math.e:
        w = math.log1p(x)
        if x > 1.0:
            w *= 0.8
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1

    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            break
    return w


# ---------------------------------------------------------------------------
# Exponential integral
# ---------------------------------------------------------------------------

def _e1_series(z: float) -> float:
    # E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!),  0 < z <= 1
    total = 0.0
    term = 1.0
    for k in range(1, 60):
        term *= -z / k
        contrib = term / k
        total += contrib
        if abs(contrib) < 1e-17 * abs(total):
            break
    return -EULER_GAMMA - math.log(z) - total


def _e1_continued_fraction(z: float) -> float:
    # modified Lentz on E1(z) = e^-z / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))
    tiny = 1e-300
    b = z + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-z)


def _ei_positive(x: float) -> float:
    if x <= 40.0:
        total = 0.0
        term = 1.0
        for k in range(1, 400):
            term *= x / k
            contrib = term / k
            total += contrib
            if contrib < 1e-17 * total:
                break
        return EULER_GAMMA + math.log(x) + total
    # asymptotic series, cut at the smallest term
    total = 1.0
    term = 1.0
    for k in range(1, 200):
        nxt = term * k / x
        if nxt > term:
            break
        term = nxt
        total += term
        if term < 1e-17 * total:
            break
    return math.exp(x) / x * total


def expint_ei(x: float) -> float:
    """Exponential integral Ei(x) (Cauchy principal value for ``x > 0``)."""
    x = float(x)
    if x == 0.0:
        raise SpecialFunctionError("expint_ei: logarithmic singularity at x = 0")
    if math.isnan(x):
        raise SpecialFunctionError("expint_ei: NaN argument")
    if x > 0.0:
        return _ei_positive(x)
    z = -x
    if math.isinf(z):
        return 0.0
    if z <= 1.0:
        return -_e1_series(z)
    return -_e1_continued_fraction(z)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and panel layout for :func:`integrate`."""

    rel_tol: float = 1e-12
    max_subdivisions: int = 4000
    breakpoints: tuple[float, ...] = field(default_factory=tuple)
    abs_tol: float = 0.0

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError("QuadratureSpec: rel_tol must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("QuadratureSpec: max_subdivisions must be >= 1")
        bp = tuple(float(b) for b in self.breakpoints)
        if any(b2 < b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("QuadratureSpec: breakpoints must be sorted")
        object.__setattr__(self, "breakpoints", bp)

    def with_breakpoints(self, points: Sequence[float]) -> "QuadratureSpec":
        pts = sorted(float(p) for p in points if math.isfinite(p))
        return QuadratureSpec(self.rel_tol, self.max_subdivisions, tuple(pts), self.abs_tol)


def _gl(f: Callable, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _GL_NODES
    y = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    return half * float(np.dot(_GL_WEIGHTS, y))


def integrate(f: Callable, a: float, b: float, spec: QuadratureSpec | None = None) -> float:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    ``f`` must accept a numpy array of abscissae. The interval is first cut
    at ``spec.breakpoints``; panels are then bisected (largest error first)
    until the summed error estimate is within ``rel_tol`` of the total.
    """
    spec = spec or QuadratureSpec()
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate: limits must be finite")
    if b < a:
        raise ValueError("integrate: requires a <= b")
    if a == b:
        return 0.0

    cuts = [a] + [p for p in spec.breakpoints if a < p < b] + [b]
    heap: list[tuple[float, float, float, float]] = []
    total = 0.0
    err_total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        val, err = _panel(f, lo, hi)
        total += val
        err_total += err
        heapq.heappush(heap, (-err, lo, hi, val))

    splits = 0
    while err_total > max(spec.rel_tol * abs(total), spec.abs_tol):
        if splits >= spec.max_subdivisions:
            raise QuadratureError(
                f"integrate: no convergence on [{a}, {b}] after {splits} subdivisions "
                f"(error estimate {err_total:.3e}, value {total:.6e})"
            )
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # interval collapsed to adjacent floats; accept what we have
            break
        v1, e1 = _panel(f, lo, mid)
        v2, e2 = _panel(f, mid, hi)
        total += v1 + v2 - val
        err_total += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        splits += 1
    return total


def _panel(f: Callable, lo: float, hi: float) -> tuple[float, float]:
    whole = _gl(f, lo, hi)
    mid = 0.5 * (lo + hi)
    halves = _gl(f, lo, mid) + _gl(f, mid, hi)
    return halves, abs(halves - whole)


# ---------------------------------------------------------------------------
# Elementary exponential moment
# ---------------------------------------------------------------------------

def _phi2(z: float) -> float:
    # (1 - e^-z (1 + z)) / z^2, series near 0
    if z < 1e-3:
        return 0.5 - z / 3.0 + z * z / 8.0 - z ** 3 / 30.0
    return (-math.expm1(-z) - z * math.exp(-z)) / (z * z)


def _phi1(z: float) -> float:
    # (1 - e^-z) / z, series near 0
    if z < 1e-5:
        return 1.0 - z / 2.0 + z * z / 6.0
    return -math.expm1(-z) / z


def exp_moment(a: float, b: float, eta: float) -> float:
    """``int_a^b t exp(-eta t) dt`` for ``0 <= a <= b <= inf`` and ``eta >= 0``.

    Returns 0 when ``a == b`` (including ``a == b == inf``) and ``inf`` for an
    unbounded interval with ``eta == 0``.
    """
    if eta < 0.0:
        raise ValueError("exp_moment: eta must be >= 0")
    if not 0.0 <= a <= b:
        raise ValueError("exp_moment: requires 0 <= a <= b")
    if a == b:
        return 0.0
    if math.isinf(b):
        if eta == 0.0:
            return math.inf
        return math.exp(-eta * a) * (1.0 + eta * a) / (eta * eta)
    # shift to t = a + s: every term below is positive, so narrow or distant
    # intervals lose no digits to cancellation
    w = b - a
    z = eta * w
    return math.exp(-eta * a) * (a * w * _phi1(z) + w * w * _phi2(z))
