import math

import numpy as np
import pytest

from hetnetlb.scenario import (BadReference, MissingField, OutOfRange, Variant,
                               db_to_linear, dbm_to_mw, linear_to_db,
                               out_of_band_scenario, reference_scenario, to_raw,
                               validate)


def raw_reference():
    return {
        "region": {"side_km": "10", "pathloss_exponent": "3.5", "min_distance_m": "1"},
        "band.1": {"bandwidth_mhz": "10", "noise_dbm": "-95"},
        "tier.1": {"density_per_km2": "1", "tx_power_dbm": "46", "band": "1",
                   "macro": "true"},
        "tier.2": {"density_per_km2": "5", "tx_power_dbm": "23", "bias_db": "0",
                   "band": "1"},
        "users": {"density_per_km2": "30"},
    }


def test_reference_scenario_is_valid():
    s = validate(raw_reference())
    assert s.region_side_km == 10.0
    assert len(s.tiers) == 2 and len(s.bands) == 1
    assert s.tiers[0].is_macro and not s.tiers[1].is_macro
    assert s.tiers[0].tx_power_mw == pytest.approx(dbm_to_mw(46.0))
    assert s.bands[0].noise_mw == pytest.approx(dbm_to_mw(-95.0))
    assert s.blanking.variant == Variant.OFF and s.blanking.eta == 0.0
    # matches the programmatic constructor
    assert s == reference_scenario()


def test_negative_density_rejected():
    raw = raw_reference()
    raw["tier.2"]["density_per_km2"] = "-1"
    with pytest.raises(OutOfRange) as err:
        validate(raw)
    assert "tier.2.density_per_km2" in str(err.value)


def test_bias_db_stored_linear():
    raw = raw_reference()
    raw["tier.2"]["bias_db"] = "10"
    s = validate(raw)
    assert s.tiers[1].bias == 10.0  # 10^(10/10), exact


def test_missing_field_named():
    raw = raw_reference()
    del raw["tier.1"]["tx_power_dbm"]
    with pytest.raises(MissingField) as err:
        validate(raw)
    assert "tier.1.tx_power_dbm" in str(err.value)


def test_bad_band_reference_named():
    raw = raw_reference()
    raw["tier.2"]["band"] = "9"
    with pytest.raises(BadReference) as err:
        validate(raw)
    assert "tier.2.band" in str(err.value)


def test_eta_out_of_range():
    raw = raw_reference()
    raw["blanking"] = {"eta": "1.5", "variant": "all_subframes"}
    with pytest.raises(OutOfRange) as err:
        validate(raw)
    assert "blanking.eta" in str(err.value)


def test_macro_bias_must_be_zero_db():
    raw = raw_reference()
    raw["tier.1"]["bias_db"] = "3"
    with pytest.raises(OutOfRange):
        validate(raw)


def test_variant_off_forces_eta_zero():
    raw = raw_reference()
    raw["blanking"] = {"eta": "0.4", "variant": "off"}
    assert validate(raw).blanking.eta == 0.0


def test_unknown_variant_rejected():
    raw = raw_reference()
    raw["blanking"] = {"eta": "0.4", "variant": "sometimes"}
    with pytest.raises(OutOfRange):
        validate(raw)


@pytest.mark.parametrize("scenario", [
    reference_scenario(),
    out_of_band_scenario(),
    reference_scenario(amc_floor_db=-6.5).with_blanking(0.5, Variant.RE_ONLY_IN_BLANK),
    reference_scenario().with_small_cell_bias_db(7.0),
])
def test_round_trip_is_identical(scenario):
    assert validate(to_raw(scenario)) == scenario


def test_db_linear_round_trip():
    rng = np.random.default_rng(3)
    for x in rng.uniform(1e-9, 1e9, size=200):
        back = db_to_linear(linear_to_db(x))
        assert math.isclose(back, x, rel_tol=1e-12)


def test_with_small_cell_bias_db():
    s = reference_scenario().with_small_cell_bias_db(13.0)
    assert s.tiers[0].bias == 1.0
    assert s.tiers[1].bias == pytest.approx(db_to_linear(13.0))


def test_out_of_band_layout():
    s = out_of_band_scenario()
    assert len(s.bands) == 2
    assert s.tiers[0].band_id == 1 and s.tiers[1].band_id == 2
    assert s.bands[1].bandwidth_hz == 20e6
