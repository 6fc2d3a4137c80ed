import math

import pytest
from hypothesis import given, strategies as st

from thzcov.scenario import (ConfigError, KTable, Scenario, db_to_linear, derive_constants,
                             dump_scenario, load_scenario, parse_config)

# arithmetic re-evaluations (30-digit mpmath)
ZETA = 0.96464029348312303267
ETA_B = 0.013481359885431136256
ETA_W = 0.076394372684109762759


class TestLoad:
    def test_empty_document_gives_defaults(self):
        assert parse_config("") == Scenario()
        assert parse_config("# only a comment\n\n") == Scenario()

    def test_defaults_match_table(self, table2):
        n, b, p = table2.network, table2.blockage, table2.propagation
        assert (n.ap_height, n.ue_height, n.ap_density) == (3.0, 1.3, 0.1)
        assert (n.room_length, n.room_width) == (60.0, 50.0)
        assert b.self_block_angle == pytest.approx(math.radians(60))
        assert (b.blocker_height, b.blocker_w1, b.blocker_w2, b.blocker_density) == (1.7, 0.6, 0.3, 0.1)
        assert (b.wall_mean_length, b.wall_density) == (3.0, 0.04)
        assert p.tx_power == pytest.approx(10 ** -2.5)
        assert p.noise_power == pytest.approx(10 ** -10.7)
        assert (p.frequency, p.absorption) == (1.05e12, 0.07512)
        assert table2.wall_height == n.ap_height

    def test_ue_above_ap_is_rejected(self):
        with pytest.raises(ConfigError, match="h_A > h_U"):
            parse_config("h_u_m = 3.5\n")

    def test_tau_zero_db(self):
        assert parse_config("tau_db = 0").propagation.sinr_threshold == 1.0

    def test_unit_conversion(self):
        s = parse_config("phi_ah_deg = 20\np_t_dbm = 10\nf_thz = 1.0\ng_am_dbi = 20\n")
        assert s.antenna.ap.phi_h == pytest.approx(math.radians(20))
        assert s.propagation.tx_power == pytest.approx(0.01)
        assert s.propagation.frequency == 1.0e12
        assert s.antenna.ap.g_main == pytest.approx(100.0)

    def test_parse_error_reports_line(self):
        with pytest.raises(ConfigError) as err:
            parse_config("h_a_m = 3\nnot a pair\n")
        assert err.value.line == 2
        with pytest.raises(ConfigError) as err:
            parse_config("\n\nh_a_m = three\n")
        assert err.value.line == 3

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("warp_factor = 9\n")

    def test_invariants(self):
        for text in ("h_b_m = 3.5", "w1_m = 0", "lambda_b_per_m2 = -1", "phi_ah_deg = 180",
                     "k_a = 1.5", "omega_deg = 360", "tau_db = nan", "wall_len_law = cubic"):
            with pytest.raises(ConfigError):
                parse_config(text)

    def test_self_block_sector_must_leave_room_for_main_lobe(self):
        with pytest.raises(ConfigError):
            parse_config("omega_deg = 340\nphi_uh_deg = 33\n")

    def test_load_from_file_and_text(self, tmp_path):
        f = tmp_path / "s.cfg"
        f.write_text("lambda_a_per_m2 = 0.2\n")
        assert load_scenario(f).network.ap_density == 0.2
        assert load_scenario(str(f)).network.ap_density == 0.2
        assert load_scenario("lambda_a_per_m2 = 0.3").network.ap_density == 0.3
        with pytest.raises(ConfigError):
            load_scenario(str(tmp_path / "missing.cfg"))

    def test_k_table(self, tmp_path):
        f = tmp_path / "k.csv"
        f.write_text("frequency_hz,k_per_m\n1.0e12,0.05\n1.1e12,0.09\n")
        s = load_scenario(f"k_abs_table = {f}\nf_thz = 1.05\n")
        assert s.propagation.K == pytest.approx(0.07)
        with pytest.raises(ConfigError):
            KTable((1.0, 1.0), (0.1, 0.2))
        with pytest.raises(ConfigError):
            s.propagation.k_table(2.0e12)


class TestRoundTrip:
    def test_defaults(self, table2, exact):
        for s in (table2, exact):
            assert parse_config(dump_scenario(s)) == s

    @given(st.floats(2.0, 5.0), st.floats(0.1, 1.2), st.floats(0.0, 0.5), st.floats(1.0, 60.0),
           st.floats(-5.0, 10.0), st.floats(0.8, 1.2), st.floats(0.0, 0.3))
    def test_round_trip_property(self, h_a, h_u, lam_b, phi_deg, tau_db, f_thz, lam_w):
        s = Scenario().replace(**{
            "network.ap_height": h_a, "network.ue_height": h_u,
            "blockage.blocker_height": 0.5 * (h_a + h_u), "blockage.blocker_density": lam_b,
            "blockage.wall_density": lam_w, "ue.phi_h": math.radians(phi_deg),
            "propagation.sinr_threshold": db_to_linear(tau_db), "propagation.frequency": f_thz * 1e12,
        })
        assert parse_config(dump_scenario(s)) == s


class TestDerived:
    def test_blockage_constants(self, table2):
        d = derive_constants(table2)
        assert d.zeta == pytest.approx(ZETA, rel=1e-14)
        assert d.eta_b == pytest.approx(ETA_B, rel=1e-14)
        assert d.eta_w == pytest.approx(ETA_W, rel=1e-14)
        assert d.eta == d.eta_b + d.eta_w

    def test_no_blockers(self, table2):
        d = derive_constants(table2.replace(**{"blockage.blocker_density": 0.0,
                                               "blockage.wall_density": 0.0}))
        assert (d.zeta, d.eta) == (1.0, 0.0)

    def test_gain_products(self, exact):
        d = derive_constants(exact)
        c = 299_792_458.0 / (4 * math.pi * 1.05e12)
        pt = 10 ** -2.5
        assert d.g("m", "m") == pytest.approx(pt * 10 ** 2.5 * 10 ** 1.5 * c * c, rel=1e-13)
        assert d.g("s", "s") == pytest.approx(pt * 0.1 * 0.1 * c * c, rel=1e-13)

    def test_window_edges(self, exact):
        d = derive_constants(exact.replace(r_t_override=12.2))
        assert d.psi_bar == pytest.approx(math.atan2(1.7, 12.2))
        assert 0.0 <= d.x_mu < d.x_nu
        assert d.r_t == 12.2

    @given(st.floats(0.0, 1.0), st.floats(1e-4, 1.0))
    def test_blocker_density_monotone(self, lam, dlam):
        a = derive_constants(Scenario().replace(**{"blockage.blocker_density": lam}))
        b = derive_constants(Scenario().replace(**{"blockage.blocker_density": lam + dlam}))
        assert b.zeta < a.zeta
        assert b.eta_b > a.eta_b
        assert b.eta == b.eta_b + b.eta_w
