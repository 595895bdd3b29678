import math

import pytest

from zeropi import ConfigError, parse_config

MINIMAL_SPECTRUM = """
[run]
mode = spectrum

[circuit]
wp_over_e_l = 1e3
wp_over_e_c_sigma = 1e3
wp_over_e_j = 3.95
"""


class TestParseConfig:
    def test_minimal_spectrum_with_defaults(self):
        cfg = parse_config(MINIMAL_SPECTRUM)
        assert cfg.mode == "spectrum"
        assert cfg.quality == "standard"
        assert cfg.tol == 1e-10
        assert cfg.k == 6
        assert cfg.seed == 1234
        assert cfg.workers == 1
        assert cfg.params.e_j == pytest.approx(1.0 / 3.95)
        assert cfg.params.e_cj == pytest.approx(3.95 / 8.0)
        assert cfg.disorder.is_symmetric

    def test_misspelled_key_named_in_error(self):
        text = MINIMAL_SPECTRUM + "\n[disorder]\ndelta_e_jay = 0.1\n"
        with pytest.raises(ConfigError, match="delta_e_jay"):
            parse_config(text)

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="output"):
            parse_config(MINIMAL_SPECTRUM + "\n[output]\ndir = /tmp\n")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ConfigError, match="banana"):
            parse_config(MINIMAL_SPECTRUM.replace("spectrum", "banana"))

    def test_parse_error_reports_position(self):
        with pytest.raises(ConfigError, match="line"):
            parse_config("[run]\nmode spectrum without equals\n")

    def test_flux_range_expansion(self):
        text = MINIMAL_SPECTRUM.replace("spectrum", "flux-sweep") + """
[sweep]
start = 0
stop = 6.2832
count = 41
"""
        cfg = parse_config(text)
        assert len(cfg.flux_values) == 41
        assert cfg.flux_values[0] == 0.0
        assert cfg.flux_values[-1] == pytest.approx(6.2832)
        steps = [cfg.flux_values[i + 1] - cfg.flux_values[i] for i in range(40)]
        assert all(s == pytest.approx(steps[0]) for s in steps)

    def test_explicit_flux_values(self):
        text = MINIMAL_SPECTRUM.replace("spectrum", "flux-sweep") + """
[sweep]
values = 0, 1.5708, 3.1416
"""
        cfg = parse_config(text)
        assert cfg.flux_values == (0.0, 1.5708, 3.1416)

    def test_sweep_mode_requires_axis(self):
        text = MINIMAL_SPECTRUM.replace("spectrum", "flux-sweep")
        with pytest.raises(ConfigError, match="sweep"):
            parse_config(text)

    def test_dmax_grid_log_ranges(self):
        text = MINIMAL_SPECTRUM.replace("spectrum", "dmax-grid") + """
[sweep]
e_l_start = 1e-4
e_l_stop = 1e-2
e_l_count = 3
e_c_sigma_values = 1e-3
"""
        cfg = parse_config(text)
        assert cfg.e_l_values == pytest.approx((1e-4, 1e-3, 1e-2))
        assert cfg.e_c_sigma_values == (1e-3,)

    def test_disorder_axis_selection(self):
        text = MINIMAL_SPECTRUM.replace("spectrum", "disorder-sweep") + """
[sweep]
axis = delta_c_j_rel
values = 0, 0.5, 1.0
"""
        cfg = parse_config(text)
        assert cfg.disorder_axis == "delta_c_j_rel"
        assert cfg.disorder_values == (0.0, 0.5, 1.0)

    def test_raw_energy_circuit(self):
        text = """
[run]
mode = spectrum
k = 4

[circuit]
e_j = 0.3
e_l = 0.5
e_c_sigma = 0.2
e_cj = 0.8
phi_ext = 3.14159
"""
        cfg = parse_config(text)
        assert cfg.params.e_j == 0.3
        assert cfg.params.phi_ext == 3.14159
        assert cfg.params.e_c == pytest.approx(1.0 / (1.0 / 0.2 - 1.0 / 0.8))

    def test_mixed_circuit_styles_rejected(self):
        text = MINIMAL_SPECTRUM + "e_j = 0.3\n"
        with pytest.raises(ConfigError, match="mixes"):
            parse_config(text)

    def test_invalid_values_are_named(self):
        with pytest.raises(ConfigError, match="'tol'"):
            parse_config(MINIMAL_SPECTRUM.replace(
                "[circuit]", "tol = fast\n[circuit]"))
        with pytest.raises(ConfigError, match="tol must be positive"):
            parse_config(MINIMAL_SPECTRUM.replace(
                "[circuit]", "tol = -1e-9\n[circuit]"))
        with pytest.raises(ConfigError, match="k"):
            parse_config(MINIMAL_SPECTRUM.replace(
                "[circuit]", "k = 2\n[circuit]"))

    def test_export_levels_validated(self):
        text = """
[run]
mode = wavefunction-export
k = 3
levels = 0, 5

[circuit]
wp_over_e_l = 1e2
wp_over_e_c_sigma = 1e2
wp_over_e_j = 3.95
"""
        with pytest.raises(ConfigError, match="levels"):
            parse_config(text)

    def test_nonsweep_mode_rejects_sweep_section(self):
        with pytest.raises(ConfigError, match="no \\[sweep\\]"):
            parse_config(MINIMAL_SPECTRUM + "\n[sweep]\nvalues = 1\n")

    def test_comments_and_whitespace_tolerated(self):
        text = """
# full-line comment
[run]
mode = spectrum   # trailing comment
k = 4

[circuit]
wp_over_e_l = 1e3
wp_over_e_c_sigma = 1e3
wp_over_e_j = 3.95
"""
        cfg = parse_config(text)
        assert cfg.k == 4
