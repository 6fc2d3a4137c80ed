import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thzcov.coverage import (apply_sweep_value, coverage, coverage_2d_baseline, coverage_open_office,
                             evaluate, flat_human_decay, shift_main_gain, sweep)
from thzcov.dominant import lambda_far, lambda_near
from thzcov.scenario import ConfigError, db_to_linear, derive_constants

X_GRID = np.arange(1.0, 12.01, 0.5)


class TestAssembly:
    @pytest.mark.parametrize("x00", [1.0, 4.0, 6.0, 9.5])
    def test_decomposition(self, exact, x00):
        d = derive_constants(exact)
        res = coverage(x00, exact)
        lam_n, lam_f = lambda_near(x00, exact), lambda_far(x00, exact)
        assert res.lambda_near == pytest.approx(lam_n, rel=1e-14)
        assert res.lambda_far == pytest.approx(lam_f, rel=1e-14)
        assert res.p_c_los == pytest.approx(math.exp(-lam_n - lam_f), rel=1e-14)
        assert res.p_c == pytest.approx(d.zeta * math.exp(-d.eta_b * x00) * res.p_c_los, rel=1e-14)
        assert 0.0 <= res.p_c <= res.p_c_los <= 1.0

    @pytest.mark.parametrize("env", ["indoor", "open-office"])
    def test_no_interferers(self, exact, env):
        s = exact.replace(**{"network.ap_density": 0.0})
        d = derive_constants(s)
        for x00 in (0.0, 3.0, 10.0):
            res = evaluate(x00, s, env)
            assert res.p_c_los == 1.0
            assert res.p_c == pytest.approx(d.zeta * math.exp(-d.eta_b * x00), rel=1e-14)

    @pytest.mark.parametrize("env", ["indoor", "open-office"])
    def test_infeasible_serving_link(self, exact, env):
        r_t = derive_constants(exact).r_t
        res = evaluate(r_t + 0.5, exact, env)
        assert res.p_c == 0.0 and res.p_c_los == 0.0

    def test_catalogue_value(self, exact):
        # frozen from this implementation after the oracle checks in test_dominant
        assert coverage(6.0, exact).p_c == pytest.approx(0.8786, abs=5e-4)

    @pytest.mark.parametrize("x00", X_GRID[::3])
    def test_open_office_is_indoor_without_walls(self, exact, x00):
        a = coverage_open_office(x00, exact)
        b = coverage(x00, exact.without_walls())
        assert a.p_c == pytest.approx(b.p_c, rel=1e-6)
        assert a.lambda_near == pytest.approx(b.lambda_near, rel=1e-12)
        assert a.lambda_far == pytest.approx(b.lambda_far, rel=1e-6)

    @given(st.floats(0.0, 12.0))
    def test_probability_bounds(self, exact, x00):
        for env in ("indoor", "open-office"):
            r = evaluate(x00, exact, env)
            assert 0.0 <= r.p_c <= r.p_c_los <= 1.0


class TestBaseline2D:
    def test_below_3d_everywhere(self, exact):
        for x00 in X_GRID:
            for env in ("indoor", "open-office"):
                assert coverage_2d_baseline(x00, exact, environment=env).p_c <= evaluate(x00, exact, env).p_c

    def test_no_interferers(self, exact):
        s = exact.replace(**{"network.ap_density": 0.0})
        d = derive_constants(s)
        eta_h = flat_human_decay(s)
        assert eta_h == pytest.approx(2 * 0.9 * 0.1 / math.pi, rel=1e-15)
        for x00 in (1.0, 6.0):
            r = coverage_2d_baseline(x00, s, r_b=0.3)
            assert r.p_c == pytest.approx(d.zeta * math.exp(-eta_h * (x00 + 0.3)), rel=1e-14)
            assert r.p_c < coverage(x00, s).p_c

    def test_negative_offset_rejected(self, exact):
        with pytest.raises(ValueError):
            coverage_2d_baseline(3.0, exact, r_b=-0.1)

    def test_degenerate_limit_approaches_3d(self, exact):
        # blockers as tall as the APs, no offset and the widest vertical AP beam the pyramid allows
        s = exact.replace(**{"blockage.blocker_height": 2.999999, "ap.phi_v": math.radians(170.0)})
        for x00 in (2.0, 6.0):
            assert coverage_2d_baseline(x00, s, r_b=0.0).p_c == pytest.approx(coverage(x00, s).p_c, rel=1e-5)


class TestOrderings:
    def test_nonincreasing_in_distance(self, exact):
        grid = np.arange(0.5, 12.0001, 0.25)
        for env in ("indoor", "open-office"):
            pc = [evaluate(x, exact, env).p_c for x in grid]
            assert all(b <= a + 1e-12 for a, b in zip(pc, pc[1:]))

    def test_indoor_beats_open_office_far_out(self, exact):
        for x00 in X_GRID[X_GRID >= 6.0]:
            assert coverage(x00, exact).p_c >= coverage_open_office(x00, exact).p_c

    def test_blocker_density(self, exact):
        curve = sweep("lambda_b", [0.05, 0.1, 0.2, 0.4], exact, x00=6.0)
        los = [p.analytic.p_c_los for p in curve.points]
        assert all(b >= a for a, b in zip(los, los[1:]))
        assert all(b <= a for a, b in zip(curve.p_c, curve.p_c[1:]))

    def test_threshold(self, exact):
        pc = sweep("tau_db", [0.0, 3.0, 6.0], exact, x00=6.0).p_c
        assert pc[0] > pc[1] > pc[2]

    def test_ap_density(self, exact):
        pc = sweep("lambda_a", [0.05, 0.1, 0.2], exact, x00=6.0).p_c
        assert pc[0] >= pc[1] >= pc[2]

    def test_gain_towards_ap_helps(self, exact):
        moved = shift_main_gain(exact, 5.0)
        for x00 in X_GRID:
            assert coverage(x00, moved).p_c >= coverage(x00, exact).p_c - 1e-12


class TestGainSplit:
    def test_zero_shift_is_identity(self, exact, table2):
        for s in (exact, table2):
            moved = shift_main_gain(s, 0.0)
            for x00 in (2.0, 6.0, 10.0):
                assert coverage(x00, moved).p_c == pytest.approx(coverage(x00, s).p_c, rel=1e-10)

    @pytest.mark.parametrize("delta", [-5.0, -2.0, 3.0, 5.0])
    def test_product_held(self, exact, delta):
        moved = shift_main_gain(exact, delta)
        before = exact.antenna.ap.pattern().g_main * exact.antenna.ue.pattern().g_main
        after = moved.antenna.ap.pattern().g_main * moved.antenna.ue.pattern().g_main
        assert after == pytest.approx(before, rel=1e-12)
        assert moved.antenna.ap.pattern().g_main == pytest.approx(
            exact.antenna.ap.pattern().g_main * db_to_linear(delta), rel=1e-12)

    def test_beam_narrows_with_gain(self, exact):
        moved = shift_main_gain(exact, 3.0)
        assert moved.antenna.ap.phi_h < exact.antenna.ap.phi_h
        assert moved.antenna.ue.phi_v > exact.antenna.ue.phi_v


class TestSweeps:
    def test_sorted_output(self, exact):
        c = sweep("x00", [8.0, 2.0, 5.0], exact)
        assert c.values == [2.0, 5.0, 8.0]

    def test_empty_grid(self, exact):
        with pytest.raises(ValueError):
            sweep("x00", [], exact)

    def test_frequency_needs_table(self, exact):
        with pytest.raises(ConfigError):
            sweep("f_thz", [1.0, 1.1], exact)

    def test_unknown_variable(self, exact):
        with pytest.raises(ConfigError):
            apply_sweep_value(exact, "height", 1.0, 6.0)

    def test_estimator_columns(self, exact):
        c = sweep("x00", [3.0], exact, estimator=lambda s, x: (0.5, 0.01))
        assert c.points[0].mc_mean == 0.5 and c.points[0].mc_half_width == 0.01
