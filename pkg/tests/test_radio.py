import dataclasses

import numpy as np
import pytest

from hetnetlb.netgen import NetworkRealization, generate_realization
from hetnetlb.radio import (InvalidMode, Mode, PathlossModel, build_link_table,
                            received_power, sinr, sinr_matrix)
from hetnetlb.scenario import (BandConfig, ScenarioConfig, TierConfig, dbm_to_mw,
                               reference_scenario)

MODEL = PathlossModel(exponent=3.5, min_distance_m=1.0)


def make_scenario(tiers, bands, side=10.0, alpha=3.5):
    return ScenarioConfig(region_side_km=side, tiers=tuple(tiers), bands=tuple(bands),
                          user_density_per_km2=0.0, pathloss_exponent=alpha,
                          min_distance_m=1.0)


def make_realization(side, bs_xy, bs_tier, users_xy):
    return NetworkRealization(region_side_km=side, bs_xy=np.asarray(bs_xy, dtype=float),
                              bs_tier_id=np.asarray(bs_tier, dtype=np.int64),
                              users_xy=np.asarray(users_xy, dtype=float), seed=0)


def test_received_power_clamps_at_min_distance():
    assert received_power(250.0, 0.0, MODEL) == 250.0
    assert received_power(250.0, 0.0005, MODEL) == 250.0  # 0.5 m still clamped


def test_received_power_power_law():
    # 1000 mW at 10 m, alpha 3.5 -> 1000 * 10^-3.5
    assert received_power(1000.0, 0.01, MODEL) == pytest.approx(0.31622776601, rel=1e-9)


def test_received_power_doubling_distance():
    model = PathlossModel(exponent=4.0, min_distance_m=1.0)
    near = received_power(500.0, 0.1, model)
    far = received_power(500.0, 0.2, model)
    assert near / far == pytest.approx(16.0, rel=1e-12)


def test_single_bs_total_equals_link():
    s = make_scenario([TierConfig(1, 1.0, 100.0, 1.0, 1, True)],
                      [BandConfig(1, 10e6, 0.0)])
    real = make_realization(10.0, [[2.0, 2.0]], [1], [[2.0, 3.0]])
    link = build_link_table(real, s)
    assert link.total_by_band[0, 0] == link.rx_mw[0, 0]


def test_equidistant_equal_power_split():
    s = make_scenario([TierConfig(1, 1.0, 100.0, 1.0, 1, True)],
                      [BandConfig(1, 10e6, 0.0)])
    real = make_realization(10.0, [[1.0, 5.0], [3.0, 5.0]], [1, 1], [[2.0, 5.0]])
    link = build_link_table(real, s)
    assert link.rx_mw[0, 0] == link.rx_mw[0, 1]
    assert link.rx_mw[0, 0] == link.total_by_band[0, 0] / 2.0


def test_aggregates_match_brute_force_resummation():
    s = reference_scenario()
    real = generate_realization(dataclasses.replace(s, user_density_per_km2=0.2,
                                                    region_side_km=5.0), 21)
    link = build_link_table(real, dataclasses.replace(s, user_density_per_km2=0.2,
                                                      region_side_km=5.0))
    # independent re-summation, plain python loops
    for u in range(min(link.n_users, 10)):
        total = 0.0
        macro = 0.0
        for b in range(link.n_bs):
            total += link.rx_mw[u, b]
            if link.bs_is_macro[b]:
                macro += link.rx_mw[u, b]
        assert abs(total - link.total_by_band[u, 0]) <= 1e-9 * total
        assert abs(macro - link.macro_by_band[u, 0]) <= 1e-9 * max(macro, 1e-300)


def test_sinr_worked_example():
    # desired 0.5 mW, one interferer 0.05 mW, noise 0.05 mW -> SINR 5.0;
    # both BSs sit on top of the user so rx equals tx (distance clamp)
    s = make_scenario([TierConfig(1, 1.0, 0.5, 1.0, 1, True),
                       TierConfig(2, 1.0, 0.05, 1.0, 1)],
                      [BandConfig(1, 10e6, 0.05)])
    real = make_realization(10.0, [[5.0, 5.0], [5.0, 5.0]], [1, 2], [[5.0, 5.0]])
    link = build_link_table(real, s)
    assert sinr(link, 0, 0, Mode.FULL, s) == pytest.approx(5.0, rel=1e-12)


def test_sir_zero_db_symmetric():
    s = make_scenario([TierConfig(1, 1.0, 200.0, 1.0, 1, True)],
                      [BandConfig(1, 10e6, 0.0)])
    real = make_realization(10.0, [[4.0, 5.0], [6.0, 5.0]], [1, 1], [[5.0, 5.0]])
    link = build_link_table(real, s)
    assert sinr(link, 0, 0, Mode.FULL, s) == pytest.approx(1.0, rel=1e-12)


def test_macro_blanked_improves_small_cell_sinr():
    s = make_scenario([TierConfig(1, 1.0, 1000.0, 1.0, 1, True),
                       TierConfig(2, 1.0, 10.0, 1.0, 1)],
                      [BandConfig(1, 10e6, 1e-9)])
    real = make_realization(10.0, [[5.0, 5.0], [5.2, 5.0]], [1, 2], [[5.15, 5.0]])
    link = build_link_table(real, s)
    full = sinr(link, 0, 1, Mode.FULL, s)
    blanked = sinr(link, 0, 1, Mode.MACRO_BLANKED, s)
    assert blanked > full


def test_blanked_mode_invalid_for_macro():
    s = make_scenario([TierConfig(1, 1.0, 1000.0, 1.0, 1, True)],
                      [BandConfig(1, 10e6, 0.0)])
    real = make_realization(10.0, [[5.0, 5.0]], [1], [[5.5, 5.0]])
    link = build_link_table(real, s)
    with pytest.raises(InvalidMode):
        sinr(link, 0, 0, Mode.MACRO_BLANKED, s)


def test_power_scale_invariance():
    base = dataclasses.replace(reference_scenario(), user_density_per_km2=0.3,
                               region_side_km=5.0)
    noise_free = dataclasses.replace(
        base, bands=(dataclasses.replace(base.bands[0], noise_mw=0.0),))
    scaled = dataclasses.replace(
        noise_free,
        tiers=tuple(dataclasses.replace(t, tx_power_mw=t.tx_power_mw * 37.0)
                    for t in noise_free.tiers))
    real = generate_realization(noise_free, 11)
    link_a = build_link_table(real, noise_free)
    link_b = build_link_table(real, scaled)
    sir_a = sinr_matrix(link_a, noise_free, Mode.FULL)
    sir_b = sinr_matrix(link_b, scaled, Mode.FULL)
    np.testing.assert_array_equal(np.argmax(sir_a, axis=1), np.argmax(sir_b, axis=1))
    np.testing.assert_allclose(sir_b, sir_a, rtol=1e-12)


def test_fading_hook():
    s = make_scenario([TierConfig(1, 1.0, 100.0, 1.0, 1, True)],
                      [BandConfig(1, 10e6, 0.0)])
    real = make_realization(10.0, [[2.0, 2.0], [7.0, 7.0]], [1, 1], [[3.0, 3.0]])
    plain = build_link_table(real, s)
    faded = build_link_table(real, s, fading=np.full((1, 2), 0.5))
    np.testing.assert_allclose(faded.rx_mw, plain.rx_mw * 0.5, rtol=1e-15)
    np.testing.assert_allclose(faded.total_by_band, plain.total_by_band * 0.5,
                               rtol=1e-12)
