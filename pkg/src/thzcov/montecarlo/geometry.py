"""2D blockage predicates, jitted for the simulation kernels.

Walls are rows ``(cx, cy, orientation, length)`` with orientation 0
(horizontal) or pi/2 (vertical). Humans are rows ``(cx, cy, orientation)``;
the footprint is ``w1`` along the orientation and ``w2`` across it. All tests
are inclusive: touching counts as blocking.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi


@njit(cache=True)
def wrap(a):
    """Angle folded into (-pi, pi]; values already in range pass through unchanged."""
    if -math.pi < a <= math.pi:
        return a
    w = (a + math.pi) % TWO_PI - math.pi
    if w <= -math.pi:
        w = math.pi
    return w


@njit(cache=True)
def wall_endpoints(cx, cy, orient, length):
    h = 0.5 * length
    if orient == 0.0:
        return cx - h, cy, cx + h, cy
    if orient == HALF_PI:
        return cx, cy - h, cx, cy + h
    c, s = math.cos(orient), math.sin(orient)
    return cx - h * c, cy - h * s, cx + h * c, cy + h * s


@njit(cache=True)
def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


@njit(cache=True)
def _on_segment(ax, ay, bx, by, cx, cy):
    # c is collinear with a-b; check it lies within the bounding box
    return min(ax, bx) <= cx <= max(ax, bx) and min(ay, by) <= cy <= max(ay, by)


@njit(cache=True)
def segments_intersect(px, py, qx, qy, ax, ay, bx, by):
    d1 = _orient(px, py, qx, qy, ax, ay)
    d2 = _orient(px, py, qx, qy, bx, by)
    d3 = _orient(ax, ay, bx, by, px, py)
    d4 = _orient(ax, ay, bx, by, qx, qy)
    if ((d1 > 0.0 and d2 < 0.0) or (d1 < 0.0 and d2 > 0.0)) and \
            ((d3 > 0.0 and d4 < 0.0) or (d3 < 0.0 and d4 > 0.0)):
        return True
    if d1 == 0.0 and _on_segment(px, py, qx, qy, ax, ay):
        return True
    if d2 == 0.0 and _on_segment(px, py, qx, qy, bx, by):
        return True
    if d3 == 0.0 and _on_segment(ax, ay, bx, by, px, py):
        return True
    if d4 == 0.0 and _on_segment(ax, ay, bx, by, qx, qy):
        return True
    return False


@njit(cache=True)
def segment_hits_rectangle(px, py, qx, qy, cx, cy, orient, half1, half2):
    """Liang-Barsky clip of segment p-q against a rotated rectangle."""
    c, s = math.cos(orient), math.sin(orient)
    ux, uy = px - cx, py - cy
    u0 = ux * c + uy * s
    v0 = -ux * s + uy * c
    dx, dy = qx - px, qy - py
    du = dx * c + dy * s
    dv = -dx * s + dy * c
    t0, t1 = 0.0, 1.0
    for k in range(4):
        if k == 0:
            p, q = -du, u0 + half1
        elif k == 1:
            p, q = du, half1 - u0
        elif k == 2:
            p, q = -dv, v0 + half2
        else:
            p, q = dv, half2 - v0
        if p == 0.0:
            if q < 0.0:
                return False
        else:
            r = q / p
            if p < 0.0:
                if r > t1:
                    return False
                if r > t0:
                    t0 = r
            else:
                if r < t0:
                    return False
                if r < t1:
                    t1 = r
    return t0 <= t1


@njit(cache=True)
def any_wall_blocks(walls, n, px, py, qx, qy):
    lo_x, hi_x = min(px, qx), max(px, qx)
    lo_y, hi_y = min(py, qy), max(py, qy)
    for j in range(n):
        reach = 0.5 * walls[j, 3]
        cx, cy = walls[j, 0], walls[j, 1]
        # cheap bounding-box reject
        if cx + reach < lo_x or cx - reach > hi_x or cy + reach < lo_y or cy - reach > hi_y:
            continue
        ax, ay, bx, by = wall_endpoints(cx, cy, walls[j, 2], walls[j, 3])
        if segments_intersect(px, py, qx, qy, ax, ay, bx, by):
            return True
    return False


@njit(cache=True)
def any_human_blocks(humans, n, w1, w2, px, py, qx, qy):
    reach = 0.5 * math.sqrt(w1 * w1 + w2 * w2)
    lo_x, hi_x = min(px, qx) - reach, max(px, qx) + reach
    lo_y, hi_y = min(py, qy) - reach, max(py, qy) + reach
    for j in range(n):
        cx, cy = humans[j, 0], humans[j, 1]
        if cx < lo_x or cx > hi_x or cy < lo_y or cy > hi_y:
            continue
        if segment_hits_rectangle(px, py, qx, qy, cx, cy, humans[j, 2], 0.5 * w1, 0.5 * w2):
            return True
    return False


@njit(cache=True)
def truncated_end(ux, uy, ax, ay, fraction):
    """Point at ``fraction`` of the way from the UE towards the AP."""
    return ux + fraction * (ax - ux), uy + fraction * (ay - uy)


@njit(cache=True)
def self_blocked(theta_i, theta00, omega):
    return abs(wrap(theta_i - (theta00 + math.pi))) <= 0.5 * omega


# ---------------------------------------------------------------------------
# python-facing wrappers
# ---------------------------------------------------------------------------

def _as_rows(a, width):
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return np.zeros((0, width))
    return np.ascontiguousarray(a.reshape(-1, width))


def is_wall_blocked(walls, segment) -> bool:
    """True iff any wall crosses or touches the 2D segment ``((px, py), (qx, qy))``."""
    w = _as_rows(walls, 4)
    (px, py), (qx, qy) = segment
    return bool(any_wall_blocks(w, w.shape[0], float(px), float(py), float(qx), float(qy)))


def is_human_blocked(humans, ue, ap, heights, w1: float, w2: float) -> bool:
    """True iff a blocker footprint cuts the part of the UE-AP link below blocker height.

    ``heights`` is ``(h_U, h_B, h_A)``. Only the first ``(h_B - h_U)/(h_A - h_U)``
    of the horizontal projection, measured from the UE, is tested.
    """
    h_u, h_b, h_a = heights
    if not h_u < h_b < h_a:
        raise ValueError("requires h_U < h_B < h_A")
    hm = _as_rows(humans, 3)
    frac = (h_b - h_u) / (h_a - h_u)
    ux, uy = float(ue[0]), float(ue[1])
    ex, ey = truncated_end(ux, uy, float(ap[0]), float(ap[1]), frac)
    return bool(any_human_blocks(hm, hm.shape[0], float(w1), float(w2), ux, uy, ex, ey))


def in_self_blockage(theta_i: float, theta00: float, omega: float) -> bool:
    return bool(self_blocked(float(theta_i), float(theta00), float(omega)))
