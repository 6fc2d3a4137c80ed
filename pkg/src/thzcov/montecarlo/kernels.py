"""Jitted scene sampling and per-trial coverage/hitting decisions.

Every trial owns a scene stream keyed by ``(seed, trial)``; the UE of AP ``i``
in that trial is drawn from a further sub-stream keyed by ``i``. The lazy
coverage kernel and the full scene sampler therefore see the same scene, even
though the lazy kernel only draws the UEs it needs.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

from .geometry import any_human_blocks, any_wall_blocks, self_blocked, truncated_end, wrap
from .rng import SCENE_DOMAIN, UE_DOMAIN, derive_key, exponential, new_stream, poisson, uniform

TWO_PI = 2.0 * math.pi

# parameter vector layout
X00, HBAR, TRUNC, ROOM_L, ROOM_W = 0, 1, 2, 3, 4
LAM_A, LAM_B, LAM_W, W1, W2, WALL_LEN, WALL_EXP = 5, 6, 7, 8, 9, 10, 11
OMEGA, PHI_AH, PHI_AV, PHI_UH, PHI_UV = 12, 13, 14, 15, 16
G_MM, G_MS, G_SM, G_SS, K_ABS, SIGMA2, TAU, R_T = 17, 18, 19, 20, 21, 22, 23, 24
MAX_ASSOC, MAX_WALL_REDRAW = 25, 26
N_PARAMS = 27

# trial outcome codes
OUTAGE, COVERED = 0, 1


@njit(cache=True)
def _wall_length(st, p):
    if p[WALL_EXP] != 0.0:
        return exponential(st, p[WALL_LEN])
    return p[WALL_LEN]


@njit(cache=True)
def sample_walls_clear_of(st, p, half_x, half_y, sx, sy):
    """Wall process on the rectangle, redrawn until the segment origin-(sx, sy) is clear.

    Returns ``(walls, redraws, ok)``; ``ok`` is False if the redraw budget ran out.
    """
    mean = p[LAM_W] * 4.0 * half_x * half_y
    limit = int(p[MAX_WALL_REDRAW])
    redraws = 0
    while True:
        n = poisson(st, mean)
        walls = np.empty((n, 4))
        for j in range(n):
            walls[j, 0] = (2.0 * uniform(st) - 1.0) * half_x
            walls[j, 1] = (2.0 * uniform(st) - 1.0) * half_y
            walls[j, 2] = 0.0 if uniform(st) < 0.5 else 0.5 * math.pi
            walls[j, 3] = _wall_length(st, p)
        if not any_wall_blocks(walls, n, 0.0, 0.0, sx, sy):
            return walls, redraws, True
        redraws += 1
        if redraws >= limit:
            return walls, redraws, False


@njit(cache=True)
def sample_humans(st, p, half_x, half_y):
    n = poisson(st, p[LAM_B] * 4.0 * half_x * half_y)
    humans = np.empty((n, 3))
    for j in range(n):
        humans[j, 0] = (2.0 * uniform(st) - 1.0) * half_x
        humans[j, 1] = (2.0 * uniform(st) - 1.0) * half_y
        humans[j, 2] = TWO_PI * uniform(st)
    return humans


@njit(cache=True)
def sample_points(st, density, half_x, half_y):
    n = poisson(st, density * 4.0 * half_x * half_y)
    pts = np.empty((n, 2))
    for j in range(n):
        pts[j, 0] = (2.0 * uniform(st) - 1.0) * half_x
        pts[j, 1] = (2.0 * uniform(st) - 1.0) * half_y
    return pts


@njit(cache=True)
def sample_own_ue(key, ax, ay, walls, nw, p):
    """UE uniform in the radius-R_T disk around ``(ax, ay)``, redrawn until wall-clear.

    Returns ``(ux, uy, rejected)``; on exhaustion the last draw is kept.
    """
    st = new_stream(key)
    r_t = p[R_T]
    tries = int(p[MAX_ASSOC])
    ux, uy = ax, ay
    for _ in range(max(tries, 1)):
        r = r_t * math.sqrt(uniform(st))
        a = TWO_PI * uniform(st)
        ux = ax + r * math.cos(a)
        uy = ay + r * math.sin(a)
        if nw == 0 or not any_wall_blocks(walls, nw, ax, ay, ux, uy):
            return ux, uy, False
    return ux, uy, True


@njit(cache=True)
def ap_main_lobe_hits(ax, ay, ux, uy, tx, ty, hbar, phi_h, phi_v):
    """Whether an AP at ``(ax, ay)`` serving ``(ux, uy)`` covers ``(tx, ty)`` with its main lobe."""
    bx, by = ux - ax, uy - ay
    cx, cy = tx - ax, ty - ay
    az_b = math.atan2(by, bx)
    az_c = math.atan2(cy, cx)
    if abs(wrap(az_c - az_b)) > 0.5 * phi_h:
        return False
    el_b = math.atan2(hbar, math.hypot(bx, by))
    el_c = math.atan2(hbar, math.hypot(cx, cy))
    return abs(el_c - el_b) <= 0.5 * phi_v


@njit(cache=True)
def _serving_power(p):
    x00, hbar = p[X00], p[HBAR]
    d2 = x00 * x00 + hbar * hbar
    return p[G_MM] * math.exp(-p[K_ABS] * math.sqrt(d2)) / d2


@njit(cache=True)
def _user_lobe_main(theta_i, x_i, theta00, psi00, p):
    if abs(wrap(theta_i - theta00)) > 0.5 * p[PHI_UH]:
        return False
    return abs(math.atan2(p[HBAR], x_i) - psi00) <= 0.5 * p[PHI_UV]


@njit(cache=True)
def coverage_trial(p, seed, trial):
    """Outcome of one trial: ``(covered, rejected_ues, wall_redraw_exhausted)``.

    Interferers are resolved in decreasing order of their best-case power and
    the loop stops as soon as the SINR decision is settled.
    """
    key = derive_key(seed, trial, SCENE_DOMAIN)
    st = new_stream(key)
    half_x, half_y = 0.5 * p[ROOM_L], 0.5 * p[ROOM_W]
    x00, hbar = p[X00], p[HBAR]
    theta00 = TWO_PI * uniform(st)
    sx, sy = x00 * math.cos(theta00), x00 * math.sin(theta00)
    walls, _, wall_ok = sample_walls_clear_of(st, p, half_x, half_y, sx, sy)
    nw = walls.shape[0]
    humans = sample_humans(st, p, half_x, half_y)
    nh = humans.shape[0]
    aps = sample_points(st, p[LAM_A], half_x, half_y)
    n = aps.shape[0]

    # serving link: humans only (walls cleared by construction)
    ex, ey = truncated_end(0.0, 0.0, sx, sy, p[TRUNC])
    if any_human_blocks(humans, nh, p[W1], p[W2], 0.0, 0.0, ex, ey):
        return False, 0, not wall_ok
    budget = _serving_power(p) / p[TAU] - p[SIGMA2]
    if budget < 0.0:
        return False, 0, not wall_ok
    if n == 0:
        return True, 0, not wall_ok

    psi00 = math.atan2(hbar, x00)
    bound = np.zeros(n)
    ue_main = np.zeros(n, dtype=np.bool_)
    pl = np.zeros(n)
    remaining = 0.0
    for i in range(n):
        x_i = math.hypot(aps[i, 0], aps[i, 1])
        theta_i = math.atan2(aps[i, 1], aps[i, 0])
        if self_blocked(theta_i, theta00, p[OMEGA]):
            continue
        d2 = x_i * x_i + hbar * hbar
        pl[i] = math.exp(-p[K_ABS] * math.sqrt(d2)) / d2
        ue_main[i] = _user_lobe_main(theta_i, x_i, theta00, psi00, p)
        g_best = p[G_MM] if ue_main[i] else p[G_MS]
        bound[i] = g_best * pl[i]
        remaining += bound[i]

    order = np.argsort(-bound)
    total = 0.0
    rejected = 0
    for idx in range(n):
        if total > budget:
            return False, rejected, not wall_ok
        if total + remaining <= budget:
            return True, rejected, not wall_ok
        i = order[idx]
        if bound[i] == 0.0:
            break
        remaining -= bound[i]
        ax, ay = aps[i, 0], aps[i, 1]
        if nw > 0 and any_wall_blocks(walls, nw, 0.0, 0.0, ax, ay):
            continue
        hx, hy = truncated_end(0.0, 0.0, ax, ay, p[TRUNC])
        if any_human_blocks(humans, nh, p[W1], p[W2], 0.0, 0.0, hx, hy):
            continue
        ux, uy, rej = sample_own_ue(derive_key(key, i, UE_DOMAIN), ax, ay, walls, nw, p)
        if rej:
            rejected += 1
        if ap_main_lobe_hits(ax, ay, ux, uy, 0.0, 0.0, hbar, p[PHI_AH], p[PHI_AV]):
            g = p[G_MM] if ue_main[i] else p[G_MS]
        else:
            g = p[G_SM] if ue_main[i] else p[G_SS]
        total += g * pl[i]
    return total <= budget, rejected, not wall_ok


@njit(cache=True, parallel=True)
def coverage_batch(p, seed, start, count):
    covered = np.zeros(count, dtype=np.bool_)
    rejected = np.zeros(count, dtype=np.int64)
    exhausted = np.zeros(count, dtype=np.bool_)
    for t in prange(count):
        c, r, e = coverage_trial(p, seed, start + t)
        covered[t] = c
        rejected[t] = r
        exhausted[t] = e
    return covered, rejected, exhausted


@njit(cache=True)
def sample_full_scene(p, seed, trial):
    """Every element of the trial's scene, including all interferer UEs."""
    key = derive_key(seed, trial, SCENE_DOMAIN)
    st = new_stream(key)
    half_x, half_y = 0.5 * p[ROOM_L], 0.5 * p[ROOM_W]
    x00 = p[X00]
    theta00 = TWO_PI * uniform(st)
    sx, sy = x00 * math.cos(theta00), x00 * math.sin(theta00)
    walls, redraws, wall_ok = sample_walls_clear_of(st, p, half_x, half_y, sx, sy)
    humans = sample_humans(st, p, half_x, half_y)
    aps = sample_points(st, p[LAM_A], half_x, half_y)
    n = aps.shape[0]
    ues = np.empty((n, 2))
    rejected = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        ux, uy, rej = sample_own_ue(derive_key(key, i, UE_DOMAIN), aps[i, 0], aps[i, 1],
                                    walls, walls.shape[0], p)
        ues[i, 0] = ux
        ues[i, 1] = uy
        rejected[i] = rej
    return theta00, walls, humans, aps, ues, rejected, redraws, wall_ok


@njit(cache=True)
def scene_sinr(p, theta00, walls, humans, aps, ues):
    """``(sinr, serving_los, interference)`` of a fully sampled scene."""
    x00, hbar = p[X00], p[HBAR]
    nw, nh = walls.shape[0], humans.shape[0]
    sx, sy = x00 * math.cos(theta00), x00 * math.sin(theta00)
    ex, ey = truncated_end(0.0, 0.0, sx, sy, p[TRUNC])
    serving_los = not any_human_blocks(humans, nh, p[W1], p[W2], 0.0, 0.0, ex, ey)
    psi00 = math.atan2(hbar, x00)
    total = 0.0
    for i in range(aps.shape[0]):
        ax, ay = aps[i, 0], aps[i, 1]
        x_i = math.hypot(ax, ay)
        theta_i = math.atan2(ay, ax)
        if self_blocked(theta_i, theta00, p[OMEGA]):
            continue
        if nw > 0 and any_wall_blocks(walls, nw, 0.0, 0.0, ax, ay):
            continue
        hx, hy = truncated_end(0.0, 0.0, ax, ay, p[TRUNC])
        if any_human_blocks(humans, nh, p[W1], p[W2], 0.0, 0.0, hx, hy):
            continue
        ue_main = _user_lobe_main(theta_i, x_i, theta00, psi00, p)
        if ap_main_lobe_hits(ax, ay, ues[i, 0], ues[i, 1], 0.0, 0.0, hbar, p[PHI_AH], p[PHI_AV]):
            g = p[G_MM] if ue_main else p[G_MS]
        else:
            g = p[G_SM] if ue_main else p[G_SS]
        d2 = x_i * x_i + hbar * hbar
        total += g * math.exp(-p[K_ABS] * math.sqrt(d2)) / d2
    return _serving_power(p) / (p[SIGMA2] + total), serving_los, total


@njit(cache=True)
def hitting_trial(p, x_i0, seed, trial, walled):
    """Does a fresh interferer at horizontal distance ``x_i0`` hit the user with its main lobe?"""
    key = derive_key(seed, trial, SCENE_DOMAIN)
    st = new_stream(key)
    a = TWO_PI * uniform(st)
    tx, ty = x_i0 * math.cos(a), x_i0 * math.sin(a)
    nw = 0
    walls = np.zeros((0, 4))
    if walled and p[LAM_W] > 0.0:
        # walls around the AP, wide enough that none outside can reach its disk
        reach = p[R_T] + (0.5 * p[WALL_LEN] if p[WALL_EXP] == 0.0 else 20.0 * p[WALL_LEN])
        n = poisson(st, p[LAM_W] * 4.0 * reach * reach)
        walls = np.empty((n, 4))
        for j in range(n):
            walls[j, 0] = (2.0 * uniform(st) - 1.0) * reach
            walls[j, 1] = (2.0 * uniform(st) - 1.0) * reach
            walls[j, 2] = 0.0 if uniform(st) < 0.5 else 0.5 * math.pi
            walls[j, 3] = _wall_length(st, p)
        nw = n
    ux, uy, rej = sample_own_ue(derive_key(key, 0, UE_DOMAIN), 0.0, 0.0, walls, nw, p)
    return ap_main_lobe_hits(0.0, 0.0, ux, uy, tx, ty, p[HBAR], p[PHI_AH], p[PHI_AV]), rej


@njit(cache=True, parallel=True)
def hitting_batch(p, x_i0, seed, start, count, walled):
    hits = np.zeros(count, dtype=np.bool_)
    rejected = np.zeros(count, dtype=np.bool_)
    for t in prange(count):
        h, r = hitting_trial(p, x_i0, seed, start + t, walled)
        hits[t] = h
        rejected[t] = r
    return hits, rejected


@njit(cache=True, parallel=True)
def wall_los_batch(x, wall_density, wall_len, wall_exp, seed, count):
    """Wall-LoS indicator of a random-azimuth link of length ``x`` from the origin."""
    clear = np.zeros(count, dtype=np.bool_)
    reach = x + (0.5 * wall_len if wall_exp == 0.0 else 20.0 * wall_len)
    for t in prange(count):
        st = new_stream(derive_key(seed, t, SCENE_DOMAIN))
        a = TWO_PI * uniform(st)
        n = poisson(st, wall_density * 4.0 * reach * reach)
        walls = np.empty((n, 4))
        for j in range(n):
            walls[j, 0] = (2.0 * uniform(st) - 1.0) * reach
            walls[j, 1] = (2.0 * uniform(st) - 1.0) * reach
            walls[j, 2] = 0.0 if uniform(st) < 0.5 else 0.5 * math.pi
            walls[j, 3] = exponential(st, wall_len) if wall_exp != 0.0 else wall_len
        clear[t] = not any_wall_blocks(walls, n, 0.0, 0.0, x * math.cos(a), x * math.sin(a))
    return clear


@njit(cache=True, parallel=True)
def human_los_batch(x, fraction, density, w1, w2, seed, count):
    """Human-LoS indicator of a random-azimuth link whose lower ``fraction`` can be cut."""
    clear = np.zeros(count, dtype=np.bool_)
    reach = x + w1 + w2
    for t in prange(count):
        st = new_stream(derive_key(seed, t, SCENE_DOMAIN))
        a = TWO_PI * uniform(st)
        n = poisson(st, density * 4.0 * reach * reach)
        humans = np.empty((n, 3))
        for j in range(n):
            humans[j, 0] = (2.0 * uniform(st) - 1.0) * reach
            humans[j, 1] = (2.0 * uniform(st) - 1.0) * reach
            humans[j, 2] = TWO_PI * uniform(st)
        ex, ey = fraction * x * math.cos(a), fraction * x * math.sin(a)
        clear[t] = not any_human_blocks(humans, n, w1, w2, 0.0, 0.0, ex, ey)
    return clear
