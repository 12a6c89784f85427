import dataclasses
import math

import numpy as np
import pytest

from abfield import default_config
from abfield.analytic import consistency_report
from abfield.scenarios import (COROLLARY_STATUS, ChargeConfiguration, coulomb_field_at,
                               decoherence_sweep, electric_scenario, magnetic_scenario,
                               run_scenario, triggered_null_scenario)
from abfield.units import ConfigError, config_from_dict, config_to_dict

LN2 = math.log(2)


def _with_setup(name, **changes):
    doc = config_to_dict(default_config(name))
    doc["setup"].update(changes)
    doc.get("mirror", {}).pop("d", None)
    return config_from_dict(doc)


def test_electric_default_within_tolerances(electric_run):
    rep = electric_run.report
    tol = default_config("electric").tolerances
    assert rep.phase_error <= tol.phase
    assert rep.shift_error <= tol.shift
    assert rep.final_visibility >= 0.999
    assert rep.final_entropy <= 1e-3 * LN2
    assert rep.analytic.delta_x <= 0.01 * default_config("electric").sigma0


def test_electric_series_is_consistent(electric_run):
    s = electric_run.series
    n = len(s["t"])
    assert all(len(v) == n for v in s.values())
    assert np.all(np.diff(s["t"]) > 0)
    vis = np.hypot(s["re_overlap"], s["im_overlap"])
    assert np.allclose(vis, s["visibility"], atol=1e-15)
    assert np.all(s["visibility"] <= 1 + 1e-10)
    assert np.all(s["entropy"] >= 0) and np.all(s["entropy"] <= LN2 + 1e-12)


def test_electric_phase_sign_follows_charge():
    # the fixture covers Q > 0 (negative phase); flipping the source charge flips it
    cfg = _with_setup("electric", Q=-0.01)
    rep = electric_scenario(cfg).report
    assert rep.analytic.phi_ab > 0 and rep.simulated_phase > 0
    assert rep.phase_error <= 0.02


def test_electric_control_has_no_phase():
    run = electric_scenario(default_config("electric"), control=True)
    assert abs(run.report.simulated_phase) < 1e-12
    assert run.report.final_visibility == pytest.approx(1.0, abs=1e-10)


def test_electric_zero_charge():
    rep = electric_scenario(_with_setup("electric", Q=0.0)).report
    assert rep.simulated_phase == 0.0 and rep.simulated_shift == 0.0
    assert rep.phase_error == 0.0 and rep.shift_error == 0.0


def test_magnetic_default(magnetic_run):
    rep = magnetic_run.report
    assert rep.phase_error <= 0.02
    assert rep.shift_error <= 0.02
    assert rep.final_entropy <= 1e-3 * LN2
    assert len(magnetic_run.branches) == 2


def test_magnetic_zero_charge():
    rep = magnetic_scenario(_with_setup("magnetic", Q=0.0)).report
    assert rep.simulated_phase == 0.0 and rep.final_visibility == pytest.approx(1.0, abs=1e-10)


def test_run_scenario_dispatch():
    with pytest.raises(ConfigError):
        run_scenario(default_config("null_check"))
    with pytest.raises(ConfigError):
        electric_scenario(default_config("magnetic"))


def test_null_check_fourfold_charge(natural):
    for r in (0.3, 1.0, 7.0):
        out = triggered_null_scenario(r, 4 * natural.e_charge, natural)
        assert out["max_residual"] <= 1e-12
        assert out["predicted_phase"] == 0.0
        assert out["status"] == COROLLARY_STATUS


def test_null_check_threefold_charge(natural):
    out = triggered_null_scenario(1.0, 3.0, natural)
    by_label = {p["label"]: p for p in out["particles"]}
    assert by_label["charge_up"]["residual"] == pytest.approx(0.25, abs=1e-15)
    assert by_label["charge_down"]["residual"] == pytest.approx(0.25, abs=1e-15)
    assert by_label["electron"]["residual"] == 0.0
    assert out["predicted_phase"] is None
    assert out["status"] != COROLLARY_STATUS


def test_null_check_without_charges(natural):
    out = triggered_null_scenario(2.0, 0.0, natural)
    assert out["max_residual"] == pytest.approx(natural.e_charge / 4, rel=1e-15)
    with pytest.raises(ValueError):
        triggered_null_scenario(0.0, 4.0, natural)


def test_coulomb_field_rules():
    cfg = ChargeConfiguration(((0.0, 0.0), (3.0, 4.0)), (1.0, 2.0), ("a", "b"))
    f = coulomb_field_at((0.0, 0.0), cfg)
    assert np.allclose(f, -2.0 * np.array([3.0, 4.0]) / 125.0)
    with pytest.raises(ValueError):
        coulomb_field_at((0.0, 0.0), cfg, exclude_self=False)
    with pytest.raises(ValueError):
        ChargeConfiguration(((0, 0), (0, 0)), (1, 1), ("a", "b"))


def test_analytic_report_shift_scale():
    cfg = default_config("decoherence")
    rep = consistency_report(cfg.setup, cfg.constants)
    assert abs(rep.delta_x) == pytest.approx(0.5, rel=1e-12)


@pytest.mark.slow
def test_large_shift_washes_out_fringes():
    # delta_x / sigma = 5 per source; two sources compose the electron's overlap
    cfg = dataclasses.replace(default_config("decoherence"), sigma0=0.1)
    run = electric_scenario(cfg)
    assert run.report.final_visibility <= 0.05
    per_source = decoherence_sweep(cfg, [0.1])[0]
    assert per_source.shift_over_sigma >= 4.9
    assert per_source.visibility_sim < 0.1


@pytest.mark.slow
def test_shift_three_sigma_matches_model():
    # at delta_x / sigma = 3 the composite visibility is the squared per-source model,
    # about 0.11, which is above a 0.05 washout threshold
    cfg = dataclasses.replace(default_config("decoherence"), sigma0=0.5 / 3)
    run = electric_scenario(cfg)
    point = decoherence_sweep(cfg, [cfg.sigma0])[0]
    assert run.report.final_visibility == pytest.approx(point.visibility_model**2, rel=0.04)
    assert run.report.final_visibility > 0.05
