import math
import os

import numpy as np
import pytest

from hetnetlb.fixtures import ORACLE_RATES, generate_fixtures, load_expected
from hetnetlb.loadopt import RateMatrix, log_utility, round_association, solve_relaxed
from hetnetlb.netgen import DegenerateScenario, generate_realization
from hetnetlb.cli import parse_config_file
from hetnetlb.scenario import validate

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def test_regeneration_is_byte_identical(tmp_path):
    generate_fixtures(str(tmp_path))
    for name in sorted(os.listdir(FIXTURE_DIR)):
        committed = open(os.path.join(FIXTURE_DIR, name), "rb").read()
        fresh = open(tmp_path / name, "rb").read()
        assert fresh == committed, f"{name} drifted from its generator"


def test_oracle_fixture_objective():
    expected = load_expected(os.path.join(FIXTURE_DIR, "oracle_3users_2bs_expected.csv"))
    assert float(expected["objective_nats"]) == pytest.approx(2.7726, abs=1e-4)
    # the solver reproduces the frozen assignment and objective
    rm = RateMatrix(ORACLE_RATES)
    frac, state = solve_relaxed(rm)
    rounded = round_association(frac, rm)
    for u in range(3):
        assert rounded.serving[u] == int(expected[f"serving_user{u}"])
    assert log_utility(rounded, rm) == pytest.approx(float(expected["objective_nats"]),
                                                     abs=1e-9)
    assert state.best_dual >= float(expected["objective_nats"]) - 1e-6


def test_switching_bias_fixture_matches_association():
    from hetnetlb.assoc import associate_biased
    from hetnetlb.netgen import NetworkRealization
    from hetnetlb.radio import build_link_table
    from hetnetlb.scenario import (BandConfig, ScenarioConfig, TierConfig,
                                   db_to_linear, dbm_to_mw)

    exp = load_expected(os.path.join(FIXTURE_DIR, "single_user_switching_expected.csv"))
    s = ScenarioConfig(
        region_side_km=float(exp["region_side_km"]),
        tiers=(TierConfig(1, 0.0, dbm_to_mw(float(exp["macro_tx_dbm"])), 1.0, 1, True),
               TierConfig(2, 0.0, dbm_to_mw(float(exp["pico_tx_dbm"])), 1.0, 1)),
        bands=(BandConfig(1, 10e6, 0.0),),
        user_density_per_km2=0.0,
        pathloss_exponent=float(exp["pathloss_exponent"]), min_distance_m=1.0)
    real = NetworkRealization(
        region_side_km=s.region_side_km,
        bs_xy=np.array([[float(exp["macro_x_km"]), float(exp["macro_y_km"])],
                        [float(exp["pico_x_km"]), float(exp["pico_y_km"])]]),
        bs_tier_id=np.array([1, 2]),
        users_xy=np.array([[float(exp["user_x_km"]), float(exp["user_y_km"])]]),
        seed=0)
    link = build_link_table(real, s)
    threshold = float(exp["switching_bias_db"])
    below = associate_biased(link, [1.0, db_to_linear(threshold - 1e-6)])
    above = associate_biased(link, [1.0, db_to_linear(threshold + 1e-6)])
    assert below.serving[0] == 0 and above.serving[0] == 1


def test_empty_tier_fixture_degenerates():
    exp = load_expected(os.path.join(FIXTURE_DIR, "empty_tier_expected.csv"))
    assert exp["error"] == "DegenerateScenario"
    scenario = validate(parse_config_file(os.path.join(FIXTURE_DIR, "empty_tier.ini")))
    with pytest.raises(DegenerateScenario):
        generate_realization(scenario, 1)
