import math

import numpy as np
import pytest

from hetnetlb.assoc import Association, PolicyTag, brute_force_log_utility
from hetnetlb.loadopt import (FractionalAssociation, NoFeasibleUser, RateMatrix,
                              SolverParams, UndefinedUtility, load_response,
                              log_utility, round_association, solve_relaxed,
                              write_trace_csv)


def test_load_response_at_unit_price():
    assert load_response(1.0) == 1.0
    np.testing.assert_allclose(load_response(np.array([1.0, 1.0])), [1.0, 1.0])


def test_single_bs_one_iteration():
    c = np.array([[1e7], [2e7], [3e7]])
    frac, state = solve_relaxed(RateMatrix(c))
    assert state.iterations == 1
    np.testing.assert_array_equal(frac.x, np.ones((3, 1)))
    expected = sum(math.log(v / 3.0) for v in (1e7, 2e7, 3e7))
    assert state.best_primal == pytest.approx(expected, rel=1e-12)


def test_oracle_instance_recovered():
    c = np.array([[4.0, 1.0], [4.0, 1.0], [1.0, 4.0]])
    oracle_assoc, oracle_obj = brute_force_log_utility(c)
    frac, state = solve_relaxed(RateMatrix(c))
    rounded = round_association(frac, RateMatrix(c))
    np.testing.assert_array_equal(rounded.serving, oracle_assoc.serving)
    assert rounded.policy_tag == PolicyTag.LOAD_AWARE
    assert state.best_dual >= oracle_obj - 1e-6
    assert log_utility(rounded, RateMatrix(c)) == pytest.approx(oracle_obj, abs=1e-9)


def test_round_integral_unchanged():
    x = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    rounded = round_association(FractionalAssociation(x), RateMatrix(np.ones((3, 2))))
    np.testing.assert_array_equal(rounded.serving, [0, 1, 0])


def test_round_tie_goes_low():
    x = np.array([[0.5, 0.5]])
    rounded = round_association(FractionalAssociation(x), RateMatrix(np.ones((1, 2))))
    assert rounded.serving[0] == 0


def test_round_reproducible():
    rng = np.random.default_rng(5)
    raw = rng.uniform(size=(20, 4))
    x = raw / raw.sum(axis=1, keepdims=True)
    rm = RateMatrix(np.ones((20, 4)))
    a = round_association(FractionalAssociation(x), rm).serving
    b = round_association(FractionalAssociation(x.copy()), rm).serving
    np.testing.assert_array_equal(a, b)


def test_log_utility_examples():
    one = Association(serving=np.array([0]), policy_tag=PolicyTag.ORACLE)
    assert log_utility(one, RateMatrix(np.array([[math.e]]))) == pytest.approx(1.0)
    # splitting two identical users across two identical BSs beats stacking
    c = np.full((2, 2), 8.0)
    split = Association(serving=np.array([0, 1]), policy_tag=PolicyTag.ORACLE)
    stack = Association(serving=np.array([0, 0]), policy_tag=PolicyTag.ORACLE)
    assert log_utility(split, RateMatrix(c)) > log_utility(stack, RateMatrix(c))
    assert log_utility(split, RateMatrix(c)) == pytest.approx(2 * math.log(8.0))
    assert log_utility(stack, RateMatrix(c)) == pytest.approx(2 * math.log(4.0))


def test_log_utility_rejects_zero_rate():
    assoc = Association(serving=np.array([1]), policy_tag=PolicyTag.ORACLE)
    with pytest.raises(UndefinedUtility):
        log_utility(assoc, RateMatrix(np.array([[5.0, 0.0]])))


def test_no_feasible_user():
    c = np.array([[1.0, 2.0], [0.0, 0.0]])
    with pytest.raises(NoFeasibleUser):
        solve_relaxed(RateMatrix(c))


def test_zero_columns_never_chosen():
    c = np.array([[1e6, 0.0], [2e6, 0.0], [5e5, 0.0]])
    frac, _ = solve_relaxed(RateMatrix(c))
    rounded = round_association(frac, RateMatrix(c))
    assert np.all(rounded.serving == 0)


def test_dual_upper_bounds_any_binary_association():
    rng = np.random.default_rng(77)
    for _ in range(30):
        u, b = rng.integers(2, 13), rng.integers(2, 4)
        c = rng.uniform(1e6, 1e8, size=(u, b))
        rm = RateMatrix(c)
        _, state = solve_relaxed(rm)
        _, oracle_obj = brute_force_log_utility(c)
        assert state.best_dual >= oracle_obj - 1e-9
        for _ in range(5):
            serving = rng.integers(0, b, size=u)
            random_assoc = Association(serving=serving, policy_tag=PolicyTag.ORACLE)
            assert state.best_dual >= log_utility(random_assoc, rm) - 1e-9


def test_convergence_50_users_10_bs():
    rng = np.random.default_rng(123)
    for _ in range(3):
        c = rng.uniform(1e6, 1e8, size=(50, 10))
        _, state = solve_relaxed(RateMatrix(c),
                                 SolverParams(step0=1.0, max_iters=5000, gap_tol=1e-12))
        assert state.relative_gap < 1e-2


def test_rounded_near_oracle():
    rng = np.random.default_rng(31)
    for _ in range(25):
        u, b = rng.integers(2, 13), rng.integers(2, 4)
        c = rng.uniform(1e6, 1e8, size=(u, b))
        rm = RateMatrix(c)
        _, oracle_obj = brute_force_log_utility(c)
        frac, _ = solve_relaxed(rm)
        value = log_utility(round_association(frac, rm), rm)
        assert value >= oracle_obj - 0.05 * abs(oracle_obj)


def test_fractional_rows_must_sum_to_one():
    with pytest.raises(ValueError):
        FractionalAssociation(np.array([[0.7, 0.7]]))
    with pytest.raises(ValueError):
        FractionalAssociation(np.array([[-0.1, 1.1]]))


def test_ergodic_average_rows_sum_to_one():
    rng = np.random.default_rng(8)
    c = rng.uniform(1e6, 1e8, size=(15, 3))
    frac, _ = solve_relaxed(RateMatrix(c))
    np.testing.assert_allclose(frac.x.sum(axis=1), 1.0, atol=1e-9)


def test_trace_csv(tmp_path):
    c = np.array([[4.0, 1.0], [4.0, 1.0], [1.0, 4.0]])
    _, state = solve_relaxed(RateMatrix(c), record_trace=True)
    path = tmp_path / "trace.csv"
    write_trace_csv(state, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,dual,primal,gap"
    assert len(lines) == 1 + state.iterations
