import math

import numpy as np
import pytest

from hetnetlb.netgen import (DegenerateScenario, generate_realization,
                             pairwise_torus_distance, torus_distance,
                             write_realization_csv)
from hetnetlb.scenario import reference_scenario, single_tier_scenario


def test_zero_densities_give_empty_realization():
    s = single_tier_scenario(density_per_km2=0.0, user_density_per_km2=0.0)
    real = generate_realization(s, 5)
    assert real.n_bs == 0 and real.n_users == 0


def test_poisson_mean_bs_count():
    # density 1/km^2 over 100 km^2: sample mean over 1000 seeds within 100 +/- 3
    s = single_tier_scenario(density_per_km2=1.0, user_density_per_km2=0.0)
    counts = [generate_realization(s, seed).n_bs for seed in range(1000)]
    assert abs(np.mean(counts) - 100.0) < 3.0


def test_determinism_same_seed():
    s = reference_scenario()
    a = generate_realization(s, 123)
    b = generate_realization(s, 123)
    assert np.array_equal(a.bs_xy, b.bs_xy)
    assert np.array_equal(a.bs_tier_id, b.bs_tier_id)
    assert np.array_equal(a.users_xy, b.users_xy)


def test_different_seeds_differ():
    s = reference_scenario()
    a = generate_realization(s, 1)
    b = generate_realization(s, 2)
    assert a.n_bs != b.n_bs or not np.array_equal(a.bs_xy, b.bs_xy)


def test_torus_distance_identity():
    assert torus_distance((2.0, 3.0), (2.0, 3.0), 10.0) == 0.0


def test_torus_distance_wraps():
    assert torus_distance((0.5, 5.0), (9.5, 5.0), 10.0) == pytest.approx(1.0)


def test_torus_distance_no_wrap_shorter():
    assert torus_distance((0.0, 0.0), (5.0, 5.0), 10.0) == pytest.approx(math.sqrt(50.0))


def test_torus_distance_symmetry_and_bound():
    rng = np.random.default_rng(9)
    side = 7.0
    for _ in range(100):
        p, q = rng.uniform(0, side, 2), rng.uniform(0, side, 2)
        d_pq = torus_distance(p, q, side)
        d_qp = torus_distance(q, p, side)
        assert d_pq == d_qp
        assert d_pq <= side * math.sqrt(2) / 2 + 1e-12


def test_translation_invariance():
    rng = np.random.default_rng(4)
    side = 10.0
    pts = rng.uniform(0, side, size=(20, 2))
    shift = rng.uniform(0, side, size=2)
    moved = (pts + shift) % side
    before = pairwise_torus_distance(pts, pts, side)
    after = pairwise_torus_distance(moved, moved, side)
    np.testing.assert_allclose(after, before, rtol=1e-12, atol=1e-12)


def test_degenerate_scenario_raises():
    s = single_tier_scenario(density_per_km2=0.0, user_density_per_km2=1.0)
    with pytest.raises(DegenerateScenario):
        generate_realization(s, 1)


def test_redraw_until_servable_realization():
    # density low enough that empty draws are common: every returned
    # realization must still have a BS on the active band
    s = single_tier_scenario(density_per_km2=0.02, user_density_per_km2=0.5,
                             region_side_km=5.0)
    for seed in range(40):
        real = generate_realization(s, seed)
        assert real.n_bs >= 1


def test_points_inside_region():
    s = reference_scenario()
    real = generate_realization(s, 77)
    for xy in (real.bs_xy, real.users_xy):
        assert np.all(xy >= 0.0) and np.all(xy < s.region_side_km)


def test_realization_csv(tmp_path):
    s = single_tier_scenario(density_per_km2=0.5, user_density_per_km2=0.5,
                             region_side_km=5.0)
    real = generate_realization(s, 3)
    path = tmp_path / "real.csv"
    write_realization_csv(real, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "kind,tier_id,x_km,y_km"
    assert len(lines) == 1 + real.n_bs + real.n_users
    assert lines[1].startswith("bs,1,")
