import math

import numpy as np
import pytest

from risjam.config import (ConfigNotFoundError, ConfigSyntaxError,
                           ConfigValueError, NonSquareGeometryError,
                           UnknownKeyError, load_config, square_geometry)


def write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestDefaults:
    def test_no_file_gives_reference_defaults(self):
        cfg = load_config()
        assert cfg.geometry.carrier_freq == 28e9
        assert (cfg.geometry.n_rows, cfg.geometry.n_cols) == (4, 4)
        assert cfg.geometry.spacing_h == 0.25
        assert cfg.geometry.wavelength == pytest.approx(0.0107, abs=1e-5)
        assert cfg.scenario.path_gain_ref == pytest.approx(1000.0, rel=1e-12)
        assert cfg.scenario.path_loss_exp == 2.0
        assert cfg.scenario.dist_ris_bs == 4.0
        assert cfg.scenario.dist_ris_ue == (20.0, 25.0)
        assert cfg.scenario.dist_jammer == 30.0
        assert cfg.scenario.effective_dist_ris_jammer == 30.0
        assert cfg.scenario.jammer_power == 5e-3
        assert cfg.scenario.dir_bs.azimuth == pytest.approx(math.pi / 6)
        assert cfg.scenario.dir_users[0].elevation == pytest.approx(2 * math.pi)
        assert cfg.noise.awgn_var == pytest.approx(1e-13, rel=1e-9)
        assert cfg.noise.ris_thermal_var == pytest.approx(1e-13, rel=1e-9)
        assert cfg.traffic.arrival_rates == (500.0, 500.0)
        assert cfg.traffic.retransmissions == 10
        assert cfg.header_time == 30e-6
        assert cfg.bandwidth == 180e3
        assert cfg.blocklength == 108
        assert cfg.payload_bits == 256
        assert cfg.constraints.delay_thr == 1e-3
        assert cfg.constraints.rel_thr == 0.99999
        assert cfg.constraints.beta_max == 100.0
        assert cfg.constraints.p_max == 0.1
        assert cfg.constraints.l_max == 10
        assert cfg.ga.constraint_tolerance == 1e-30

    def test_empty_file_equals_builtin_defaults(self, tmp_path):
        cfg_file = load_config(write(tmp_path, ""))
        cfg_default = load_config()
        assert cfg_file.config_hash == cfg_default.config_hash
        assert cfg_file.echo_text() == cfg_default.echo_text()

    def test_single_override_changes_only_that_key(self, tmp_path):
        cfg = load_config(write(tmp_path, "[traffic]\narrival_rate_per_s = 100\n"))
        base = load_config()
        assert cfg.traffic.arrival_rates == (100.0, 100.0)
        diff = [(a, b) for a, b in zip(cfg.raw, base.raw) if a != b]
        assert diff == [(("traffic", "arrival_rate_per_s", "100"),
                         ("traffic", "arrival_rate_per_s", "500"))]


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigNotFoundError):
            load_config(tmp_path / "nope.ini")

    def test_malformed_syntax(self, tmp_path):
        with pytest.raises(ConfigSyntaxError):
            load_config(write(tmp_path, "[geometry\nn_elements = 4\n"))

    def test_unknown_key(self, tmp_path):
        with pytest.raises(UnknownKeyError):
            load_config(write(tmp_path, "[geometry]\nbogus = 1\n"))

    def test_unknown_section(self, tmp_path):
        with pytest.raises(UnknownKeyError):
            load_config(write(tmp_path, "[wormholes]\nmass = 1\n"))

    def test_non_square_element_count(self, tmp_path):
        with pytest.raises(NonSquareGeometryError):
            load_config(write(tmp_path, "[geometry]\nn_elements = 5\n"))

    def test_non_square_sweep_grid(self, tmp_path):
        with pytest.raises(NonSquareGeometryError):
            load_config(write(tmp_path, "[sweep]\nn_elements_grid = 4,12\n"))

    def test_bad_number(self, tmp_path):
        with pytest.raises(ConfigValueError):
            load_config(write(tmp_path, "[scenario]\npath_gain_db = many\n"))

    def test_rows_without_cols(self, tmp_path):
        with pytest.raises(ConfigValueError):
            load_config(write(tmp_path, "[geometry]\nn_rows = 2\n"))

    def test_unknown_preset(self):
        with pytest.raises(ConfigValueError):
            load_config(preset="galactic")

    def test_bad_sweep_kind(self, tmp_path):
        with pytest.raises(ConfigValueError):
            load_config(write(tmp_path, "[sweep]\nkind = delay\n"))


class TestConversionsAndOverrides:
    def test_db_dbm_and_bytes(self, tmp_path):
        cfg = load_config(write(tmp_path, "\n".join([
            "[scenario]", "path_gain_db = 20", "awgn_dbm = -90",
            "[fbl]", "payload_bytes = 10", ""])))
        assert cfg.scenario.path_gain_ref == pytest.approx(100.0, rel=1e-12)
        assert cfg.noise.awgn_var == pytest.approx(1e-12, rel=1e-9)
        assert cfg.payload_bits == 80

    def test_rectangle_geometry(self, tmp_path):
        cfg = load_config(write(tmp_path, "[geometry]\nn_rows = 2\nn_cols = 3\n"))
        assert (cfg.geometry.n_rows, cfg.geometry.n_cols) == (2, 3)

    def test_per_user_lists(self, tmp_path):
        cfg = load_config(write(tmp_path, "\n".join([
            "[scenario]",
            "dist_ris_ue_m = 10, 20, 30",
            "user_azimuth_rad = 0.1, 0.2, 0.3",
            "user_elevation_rad = -0.5",
            "[traffic]",
            "arrival_rate_per_s = 100, 200, 300", ""])))
        assert cfg.scenario.n_users == 3
        assert cfg.scenario.dir_users[2].azimuth == pytest.approx(0.3)
        assert cfg.scenario.dir_users[1].elevation == pytest.approx(-0.5)
        assert cfg.traffic.arrival_rates == (100.0, 200.0, 300.0)

    def test_presets(self):
        paper = load_config(preset="paper")
        assert paper.ga.population_size == 2000
        assert paper.ga.max_generations == 200
        assert paper.geometry.n_elements == 400
        desk = load_config(preset="desk")
        assert desk.ga.population_size == 200
        assert desk.geometry.n_elements == 16

    def test_file_overrides_preset_and_seed_wins(self, tmp_path):
        path = write(tmp_path, "[ga]\npopulation_size = 77\nrng_seed = 5\n")
        cfg = load_config(path, preset="paper", seed=99)
        assert cfg.ga.population_size == 77
        assert cfg.seed == 99
        assert cfg.ga.rng_seed == 99

    def test_grid_syntaxes(self, tmp_path):
        cfg = load_config(write(tmp_path, "\n".join([
            "[sweep]", "blocklength_grid = 1:5:2",
            "arrival_rate_grid = 10, 30", ""])))
        assert cfg.sweep.blocklength_grid == (1, 3, 5)
        assert cfg.sweep.arrival_rate_grid == (10.0, 30.0)
        with pytest.raises(ConfigValueError):
            load_config(write(tmp_path, "[sweep]\nbeta_grid = 5:1:1\n", "bad.ini"))

    def test_element_grid_defaults_per_kind(self):
        cfg = load_config()
        assert cfg.sweep.element_grid("rel-beta") == (4, 100, 400, 900)
        assert cfg.sweep.element_grid("sjnr-n") == (4, 16, 36, 64, 100, 196, 400, 625, 900)

    def test_ris_jammer_distance_override(self, tmp_path):
        cfg = load_config(write(tmp_path, "[scenario]\ndist_ris_jammer_m = 45\n"))
        assert cfg.scenario.effective_dist_ris_jammer == 45.0
        assert cfg.scenario.dist_jammer == 30.0


class TestEchoAndHash:
    def test_hash_is_stable_and_sensitive(self, tmp_path):
        assert load_config().config_hash == load_config().config_hash
        changed = load_config(write(tmp_path, "[fbl]\nblocklength = 200\n"))
        assert changed.config_hash != load_config().config_hash

    def test_echo_round_trips_as_config(self, tmp_path):
        cfg = load_config(write(tmp_path, "[traffic]\narrival_rate_per_s = 321\n"))
        echo_path = write(tmp_path, cfg.echo_text(), "echo.ini")
        again = load_config(echo_path)
        assert again.config_hash == cfg.config_hash
        assert again.traffic.arrival_rates == (321.0, 321.0)


class TestSquareGeometry:
    def test_square_side(self):
        geom = square_geometry(400)
        assert (geom.n_rows, geom.n_cols) == (20, 20)
        with pytest.raises(NonSquareGeometryError):
            square_geometry(12)
