import pytest
from hypothesis import given, settings, strategies as st

from rbcom.errors import ConfigError, InvalidArgumentError
from rbcom.scenario import (
    Scenario,
    SweepSpec,
    apply_override,
    dump_scenario,
    load_scenario,
    parse_scenario,
    provenance_lines,
    scenario_hash,
)


def test_empty_file_gives_reference_defaults():
    sc = parse_scenario("")
    assert sc == Scenario()
    g = sc.geometry
    assert (g.f, g.d, g.wavelength, g.a_g) == (0.03, 5.0, 1064e-9, 3e-3)
    assert g.f_rr == pytest.approx(3.0, rel=1e-12)
    assert sc.gain.sigma_s == 15.6e-23 and sc.gain.tau_f == 100e-6 and sc.gain.l_g == 1e-3
    assert sc.efficiencies.combined == pytest.approx(0.43905, abs=1e-5)
    assert sc.losses.R4 == 0.02
    assert (sc.shg.d_eff, sc.shg.n0, sc.shg.l_s) == (4.7e-12, 2.23, 2e-3)
    det = sc.detector
    assert (det.responsivity, det.bandwidth, det.temperature, det.load_resistance,
            det.background_current) == (0.6, 800e6, 295.0, 10e3, 5100e-6)


def test_distance_override():
    sc = parse_scenario("d = 8 m\n")
    assert sc.geometry.d == 8.0
    assert sc.geometry.f_rr == pytest.approx(3.0, rel=1e-12)


def test_unit_conversion():
    sc = parse_scenario("""
        f = 20 mm
        f_RR = 2.5 m
        lambda = 1064 nm
        tau_f = 100 us
        bandwidth = 1.2 GHz
        I_bk = 510 µA
        R4 = 1.5 %
        P_in = 0.12 kW
    """)
    assert sc.geometry.f == pytest.approx(0.02)
    assert sc.geometry.f_rr == pytest.approx(2.5, rel=1e-12)
    assert sc.gain.tau_f == pytest.approx(1e-4)
    assert sc.detector.bandwidth == pytest.approx(1.2e9)
    assert sc.detector.background_current == pytest.approx(510e-6)
    assert sc.losses.R4 == pytest.approx(0.015)
    assert sc.p_in == pytest.approx(120.0)


def test_r4_out_of_range_names_key_and_line():
    with pytest.raises(ConfigError) as exc:
        parse_scenario("d = 8 m\nR4 = 1.5\n")
    assert exc.value.key == "R4" and exc.value.line == 2
    assert "R4" in str(exc.value) and "line 2" in str(exc.value)


@pytest.mark.parametrize("text,key,fragment", [
    ("d = 8", "d", "missing unit"),
    ("d = 8 W", "d", "unit"),
    ("frobnicate = 3", "frobnicate", "unknown key"),
    ("d = 8 m\nd = 9 m", "d", "duplicate"),
    ("f = -3 mm", "f", "out of range"),
    ("f_RR = 3 m\nl = 31 mm", None, ""),
    ("sweep.start = 1 m", "sweep.variable", "sweep"),
    ("sweep.variable = lambda", "sweep.variable", "must be one of"),
])
def test_parse_errors(text, key, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_scenario(text)
    if key is not None:
        assert exc.value.key == key
    assert fragment in str(exc.value)


def test_invalid_ofdm_section_is_config_error():
    with pytest.raises(ConfigError):
        parse_scenario("ofdm.qam_order = 32")


def test_comments_and_blank_lines():
    sc = parse_scenario("# header\n\n  d = 7 m   # inline\n")
    assert sc.geometry.d == 7.0


def test_round_trip_defaults_and_custom():
    for sc in (Scenario(), parse_scenario("""
            f = 25 mm
            f_RR = 2.2 m
            d = 7.3 m
            R4 = 3 %
            gamma_diff = 0.97
            P_in = 250 W
            ofdm.qam_order = 1024
            ofdm.clip_ratio = 3.5
            sweep.variable = P_in
            sweep.start = 0 W
            sweep.stop = 400 W
            sweep.steps = 41
        """)):
        assert parse_scenario(dump_scenario(sc)) == sc


@settings(max_examples=60, deadline=None)
@given(st.floats(0.005, 0.1), st.floats(0.5, 10.0), st.floats(0.0, 30.0), st.floats(0.0, 0.5),
       st.floats(0.0, 1000.0))
def test_round_trip_property(f, f_rr, d, r4, p_in):
    sc = Scenario().with_value("f", f).with_value("f_RR", f_rr).with_value("d", d)
    sc = sc.with_value("R4", r4).with_value("P_in", p_in)
    assert parse_scenario(dump_scenario(sc)) == sc


def test_load_from_file(tmp_path):
    p = tmp_path / "s.conf"
    p.write_text("d = 8 m\nP_in = 120 W\n")
    sc = load_scenario(p)
    assert sc.geometry.d == 8.0 and sc.p_in == 120.0
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.conf")


def test_override_keeps_f_rr_when_changing_f():
    sc = apply_override(Scenario(), "f = 20 mm")
    assert sc.geometry.f == pytest.approx(0.02)
    assert sc.geometry.f_rr == pytest.approx(3.0, rel=1e-9)
    sc = apply_override(sc, "f_RR = 4 m")
    assert sc.geometry.f_rr == pytest.approx(4.0, rel=1e-12)
    with pytest.raises(ConfigError):
        apply_override(Scenario(), "no_equals_sign")


def test_sweep_spec_validation():
    assert list(SweepSpec("d", 1.0, 2.0, 3).values()) == [1.0, 1.5, 2.0]
    with pytest.raises(InvalidArgumentError):
        SweepSpec("d", 1.0, 2.0, 1)
    with pytest.raises(InvalidArgumentError):
        SweepSpec("R4", 0.1, 1.2, 5)
    with pytest.raises(InvalidArgumentError):
        SweepSpec("lambda", 0.1, 1.2, 5)


def test_provenance_banner():
    sc = parse_scenario("d = 8 m")
    lines = provenance_lines(sc)
    text = "\n".join(lines)
    assert scenario_hash(sc) in text
    for token in ("f_RR", "V =", "eta_c"):
        assert token in text
    assert scenario_hash(sc) != scenario_hash(Scenario())
    assert len(scenario_hash(sc)) == 16


def test_with_value_rejects_unknown():
    with pytest.raises(InvalidArgumentError):
        Scenario().with_value("lambda", 1.0)
