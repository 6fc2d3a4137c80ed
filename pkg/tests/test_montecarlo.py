import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thzcov.dominant import dominant_regions
from thzcov.montecarlo import (Estimate, Scene, coverage_outcomes, estimate_coverage, estimate_hitting,
                               in_self_blockage, is_human_blocked, is_wall_blocked, sample_scene, sinr)
from thzcov.scenario import derive_constants

from oracles import HEIGHTS, TRUNC, raster_rect, raster_wall

class TestPredicates:
    def test_walls_against_raster(self):
        rng = np.random.default_rng(11)
        decided = 0
        for _ in range(1000):
            link = (tuple(rng.uniform(-5, 5, 2)), tuple(rng.uniform(-5, 5, 2)))
            orient = rng.choice([0.0, math.pi / 2, rng.uniform(0, math.pi)])
            wall = (*rng.uniform(-4, 4, 2), orient, rng.uniform(0.5, 6.0))
            ref = raster_wall(link, wall)
            if ref is None:
                continue
            decided += 1
            assert is_wall_blocked(np.array([wall]), link) == ref, (link, wall)
        assert decided >= 990

    def test_humans_against_raster(self):
        rng = np.random.default_rng(12)
        decided = 0
        for _ in range(1000):
            ue = rng.uniform(-3, 3, 2)
            ap = rng.uniform(-8, 8, 2)
            human = (*rng.uniform(-3, 3, 2), rng.uniform(0, 2 * math.pi))
            end = ue + TRUNC * (ap - ue)
            ref = raster_rect((tuple(ue), tuple(end)), human, 0.6, 0.3)
            if ref is None:
                continue
            decided += 1
            assert is_human_blocked(np.array([human]), ue, ap, HEIGHTS, 0.6, 0.3) == ref, (ue, ap, human)
        assert decided >= 990

    def test_blocker_beyond_cut_height_is_ignored(self):
        # the blocker sits on the link but past the point where the ray clears its height
        ue, ap = (0.0, 0.0), (10.0, 0.0)
        assert is_human_blocked(np.array([[2.0, 0.0, 0.0]]), ue, ap, HEIGHTS, 0.6, 0.3)
        assert not is_human_blocked(np.array([[5.0, 0.0, 0.0]]), ue, ap, HEIGHTS, 0.6, 0.3)

    def test_empty_sets(self):
        assert not is_wall_blocked(np.zeros((0, 4)), ((0, 0), (1, 1)))
        assert not is_human_blocked(np.zeros((0, 3)), (0, 0), (1, 1), HEIGHTS, 0.6, 0.3)

    def test_touching_counts(self):
        wall = np.array([[1.0, 0.0, math.pi / 2, 2.0]])
        assert is_wall_blocked(wall, ((0.0, 1.0), (2.0, 1.0)))   # grazes the endpoint
        assert not is_wall_blocked(wall, ((0.0, 1.001), (2.0, 1.001)))

    def test_bad_heights(self):
        with pytest.raises(ValueError):
            is_human_blocked(np.zeros((0, 3)), (0, 0), (1, 1), (1.3, 3.5, 3.0), 0.6, 0.3)


class TestSelfBlockage:
    @pytest.mark.parametrize("theta,expected", [
        (math.pi, True), (math.pi + math.radians(29), True), (math.pi - math.radians(29), True),
        (math.pi + math.radians(31), False), (0.0, False), (-math.pi, True),
    ])
    def test_sector(self, theta, expected):
        assert in_self_blockage(theta, 0.0, math.radians(60)) is expected

    def test_rotates_with_serving_direction(self):
        assert in_self_blockage(0.1, math.pi, math.radians(60))
        assert not in_self_blockage(math.pi, math.pi, math.radians(60))

    @given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.0, 6.0))
    def test_periodic(self, theta, theta00, omega):
        a = in_self_blockage(theta, theta00, omega)
        b = in_self_blockage(theta + 2 * math.pi, theta00, omega)
        # equality can flip only on the sector boundary itself
        edge = abs(abs(math.remainder(theta - theta00 - math.pi, 2 * math.pi)) - omega / 2) < 1e-9
        assert a == b or edge


class TestScenes:
    def test_invariants(self, exact):
        d = derive_constants(exact)
        counts = []
        for trial in range(200):
            sc = sample_scene(exact, 6.0, rng=5, trial=trial)
            counts.append(len(sc.aps))
            assert sc.serving_ap == pytest.approx((6 * math.cos(sc.serving_azimuth),
                                                    6 * math.sin(sc.serving_azimuth)))
            assert np.all(np.abs(sc.aps[:, 0]) <= 30) and np.all(np.abs(sc.aps[:, 1]) <= 25)
            assert np.all(np.hypot(*(sc.ues - sc.aps).T) <= d.r_t + 1e-12)
            assert sc.wall_conditioning_ok
            assert not is_wall_blocked(sc.walls, ((0.0, 0.0), sc.serving_ap))
            assert set(np.unique(sc.walls[:, 2])) <= {0.0, math.pi / 2}
        mean = 0.1 * 60 * 50
        assert abs(np.mean(counts) - mean) < 4 * math.sqrt(mean / len(counts))

    def test_reproducible(self, exact):
        a = sample_scene(exact, 4.0, rng=9, trial=3)
        b = sample_scene(exact, 4.0, rng=9, trial=3)
        c = sample_scene(exact, 4.0, rng=9, trial=4)
        assert np.array_equal(a.aps, b.aps) and np.array_equal(a.walls, b.walls)
        assert not np.array_equal(a.aps, c.aps)

    def test_rejects_bad_inputs(self, exact):
        with pytest.raises(ValueError):
            estimate_coverage(exact, 3.0, 0)
        with pytest.raises(ValueError):
            sample_scene(exact, 100.0)
        with pytest.raises(ValueError):
            estimate_hitting(exact, -1.0, 10)


class TestSinr:
    def test_lone_interferer_at_dominant_distance(self, exact):
        x00 = 6.0
        d = derive_constants(exact)
        r = dominant_regions(x00, exact, d)
        theta00 = 0.3
        # interferer inside the user's main lobe, its own UE next to the user so its beam hits
        ap = (r.d_mm * math.cos(theta00), r.d_mm * math.sin(theta00))
        ue = (1e-3 * math.cos(theta00), 1e-3 * math.sin(theta00))
        scene = Scene(x00, theta00, np.zeros((0, 4)), np.zeros((0, 3)), np.array([ap]), np.array([ue]),
                      np.zeros(1, bool), 0, True)
        value, los = sinr(scene, exact)
        assert los
        assert value == pytest.approx(exact.propagation.sinr_threshold, rel=1e-6)

    def test_self_blocked_interferer_is_silent(self, exact):
        x00 = 6.0
        scene = Scene(x00, 0.0, np.zeros((0, 4)), np.zeros((0, 3)), np.array([[-2.0, 0.0]]),
                      np.array([[0.0, 0.0]]), np.zeros(1, bool), 0, True)
        empty = Scene(x00, 0.0, np.zeros((0, 4)), np.zeros((0, 3)), np.zeros((0, 2)), np.zeros((0, 2)),
                      np.zeros(0, bool), 0, True)
        assert sinr(scene, exact)[0] == sinr(empty, exact)[0]

    def test_noise_only(self, exact):
        d = derive_constants(exact)
        empty = Scene(6.0, 0.0, np.zeros((0, 4)), np.zeros((0, 3)), np.zeros((0, 2)), np.zeros((0, 2)),
                      np.zeros(0, bool), 0, True)
        lb = d.link
        d2 = 36 + d.hbar ** 2
        snr = lb.g_mm * math.exp(-lb.K * math.sqrt(d2)) / d2 / lb.sigma2
        assert sinr(empty, exact)[0] == pytest.approx(snr, rel=1e-12)


class TestEstimates:
    def test_no_blockers_no_interferers(self, exact):
        s = exact.replace(**{"network.ap_density": 0.0, "blockage.blocker_density": 0.0,
                             "blockage.wall_density": 0.0})
        assert estimate_coverage(s, 6.0, 2000, rng=1).mean == 1.0

    def test_beyond_association_radius(self, exact):
        r_t = derive_constants(exact).r_t
        assert estimate_coverage(exact, r_t + 0.5, 2000, rng=1).mean == 0.0

    def test_same_seed_same_answer(self, exact):
        a = estimate_coverage(exact, 5.0, 3000, rng=42)
        b = estimate_coverage(exact, 5.0, 3000, rng=42)
        assert a == b
        g = estimate_coverage(exact, 5.0, 3000, rng=np.random.default_rng(0))
        assert 0.0 < g.mean < 1.0

    def test_doubling_trials_agrees(self, exact):
        a = estimate_coverage(exact, 5.0, 5000, rng=7)
        b = estimate_coverage(exact, 5.0, 10000, rng=8)
        assert abs(a.mean - b.mean) <= 2.5 * math.hypot(a.half_width, b.half_width) / 1.96

    @pytest.mark.parametrize("env", ["indoor", "open-office"])
    @pytest.mark.parametrize("x00", [3.0, 9.0])
    def test_lazy_matches_full_evaluation(self, exact, env, x00):
        tau = exact.propagation.sinr_threshold
        hits, _ = coverage_outcomes(exact, x00, 150, rng=21, environment=env)
        for t in range(150):
            sc = sample_scene(exact, x00, rng=21, trial=t, environment=env)
            value, los = sinr(sc, exact, env)
            assert hits[t] == (los and value >= tau)

    def test_estimate_interval(self):
        e = Estimate(0.9, 10000)
        assert e.half_width == pytest.approx(1.96 * math.sqrt(0.09 / 10000))
        lo, hi = e.interval
        assert lo < 0.9 < hi
