import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_table
from oracles import lp_transport, vertex_transport
from semoverlap.textproc import NBow
from semoverlap.transport import (
    EmptyDistributionError,
    cost_matrix,
    rwmd_lower_bound,
    solve_exact,
    solve_sinkhorn,
    wcd_lower_bound,
)


def point(table, tok):
    return NBow((table.vocab[tok],), np.array([1.0]), 1)


def dist(table, weights):
    toks = list(weights)
    return NBow(tuple(table.vocab[t] for t in toks), np.array([weights[t] for t in toks]), len(toks))


def random_instance(rng, max_support=6, dim=5, shared_vocab=None):
    m, n = rng.integers(1, max_support + 1, size=2)
    X, Y = rng.normal(size=(m, dim)), rng.normal(size=(n, dim))
    a, b = rng.random(m) + 0.05, rng.random(n) + 0.05
    return a / a.sum(), b / b.sum(), X, Y


def feasible(res, a, b, costs):
    assert np.all(res.flow >= 0)
    np.testing.assert_allclose(res.flow.sum(axis=1), a, atol=1e-7)
    np.testing.assert_allclose(res.flow.sum(axis=0), b, atol=1e-7)
    assert abs(res.objective - float((res.flow * costs).sum())) <= 1e-9


def test_cost_matrix_hand_values(unit_table):
    c = cost_matrix(point(unit_table, "cat"), point(unit_table, "dog"), unit_table)
    np.testing.assert_allclose(c, [[math.sqrt(2)]])
    assert cost_matrix(point(unit_table, "cat"), point(unit_table, "cat"), unit_table)[0, 0] == 0.0
    two = dist(unit_table, {"cat": 0.5, "dog": 0.5})
    c = cost_matrix(two, two, unit_table)
    np.testing.assert_allclose(c, [[0, math.sqrt(2)], [math.sqrt(2), 0]])


def test_cost_matrix_transpose_symmetry(small_vocab_table, rng):
    t = small_vocab_table
    a = NBow((1, 5, 9), np.array([0.2, 0.3, 0.5]), 3)
    b = NBow((2, 5), np.array([0.6, 0.4]), 2)
    np.testing.assert_array_equal(cost_matrix(a, b, t), cost_matrix(b, a, t).T)


def test_cost_matrix_empty(unit_table):
    with pytest.raises(EmptyDistributionError):
        cost_matrix(NBow((), np.zeros(0), 0), point(unit_table, "cat"), unit_table)


def test_exact_single_route():
    res = solve_exact([1.0], [1.0], np.array([[2.5]]))
    assert res.objective == 2.5
    np.testing.assert_array_equal(res.flow, [[1.0]])


def test_exact_identity_zero():
    c = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.5], [2.0, 1.5, 0.0]])
    w = np.array([0.2, 0.5, 0.3])
    assert solve_exact(w, w, c).objective == 0.0


def test_exact_two_by_two_matches_vertex_enumeration():
    a = b = [0.5, 0.5]
    c = np.array([[0.0, 1.0], [1.0, 0.0]])
    # frozen from vertex_transport(a, b, c)
    assert abs(vertex_transport(a, b, c)) < 1e-15
    res = solve_exact(a, b, c)
    assert res.objective == 0.0
    np.testing.assert_allclose(res.flow, np.diag([0.5, 0.5]))


def test_exact_empty_marginal():
    with pytest.raises(EmptyDistributionError):
        solve_exact([], [1.0], np.zeros((0, 1)))


def test_exact_rejects_unnormalized():
    with pytest.raises(ValueError):
        solve_exact([0.5], [1.0], np.array([[1.0]]))


def test_exact_shape_mismatch():
    with pytest.raises(ValueError):
        solve_exact([0.5, 0.5], [1.0], np.array([[1.0, 2.0]]))


def test_exact_vs_brute_force_small(rng):
    for _ in range(40):
        a, b, X, Y = random_instance(rng, max_support=3)
        c = np.linalg.norm(X[:, None] - Y[None], axis=2)
        assert abs(solve_exact(a, b, c).objective - vertex_transport(a, b, c)) < 1e-9


def test_exact_vs_lp_and_feasibility(rng):
    for _ in range(100):
        a, b, X, Y = random_instance(rng)
        c = np.linalg.norm(X[:, None] - Y[None], axis=2)
        res = solve_exact(a, b, c)
        feasible(res, a, b, c)
        assert abs(res.objective - lp_transport(a, b, c)) < 1e-9


def test_exact_deterministic(rng):
    a, b, X, Y = random_instance(rng)
    c = np.linalg.norm(X[:, None] - Y[None], axis=2)
    r1, r2 = solve_exact(a, b, c), solve_exact(a, b, c)
    assert r1.objective == r2.objective
    np.testing.assert_array_equal(r1.flow, r2.flow)


def test_metric_properties(rng):
    table_vecs = rng.normal(size=(12, 4))
    table = make_table({f"t{i}": v for i, v in enumerate(table_vecs)})

    def rand_nbow():
        k = int(rng.integers(1, 5))
        ids = tuple(sorted(rng.choice(12, size=k, replace=False).tolist()))
        w = rng.random(k) + 0.1
        return NBow(ids, w / w.sum(), k)

    def d(x, y):
        return solve_exact(x, y, cost_matrix(x, y, table)).objective

    for _ in range(50):
        x, y, z = rand_nbow(), rand_nbow(), rand_nbow()
        assert abs(d(x, y) - d(y, x)) < 1e-9
        assert d(x, z) <= d(x, y) + d(y, z) + 1e-7
        assert d(x, x) == 0.0
        if x.support != y.support or not np.array_equal(x.weights, y.weights):
            assert d(x, y) > 0


def test_wcd_cases(unit_table):
    cat, dog = point(unit_table, "cat"), point(unit_table, "dog")
    assert wcd_lower_bound(cat, cat, unit_table) == 0.0
    wmd = solve_exact(cat, dog, cost_matrix(cat, dog, unit_table)).objective
    assert wcd_lower_bound(cat, dog, unit_table) == pytest.approx(wmd, abs=1e-12)


def test_rwmd_cases(unit_table):
    cat, dog = point(unit_table, "cat"), point(unit_table, "dog")
    two = dist(unit_table, {"cat": 0.5, "dog": 0.5})
    assert rwmd_lower_bound(two, two, cost_matrix(two, two, unit_table)) == 0.0
    c = cost_matrix(cat, dog, unit_table)
    assert rwmd_lower_bound(cat, dog, c) == solve_exact(cat, dog, c).objective


def test_bounds_below_exact(rng):
    for _ in range(200):
        a, b, X, Y = random_instance(rng)
        c = np.linalg.norm(X[:, None] - Y[None], axis=2)
        table = make_table({**{f"x{i}": v for i, v in enumerate(X)}, **{f"y{j}": v for j, v in enumerate(Y)}})
        na = NBow(tuple(range(len(a))), a, len(a))
        nb = NBow(tuple(range(len(a), len(a) + len(b))), b, len(b))
        exact = solve_exact(na, nb, c).objective
        assert wcd_lower_bound(na, nb, table) <= exact + 1e-9
        assert rwmd_lower_bound(na, nb, c) <= exact + 1e-9


def test_rwmd_can_undercut_centroid_bound():
    # Shared support, different weights: every point has a zero-cost partner so
    # RWMD is 0, while the centroids differ. The two bounds are not ordered.
    table = make_table({"p": [0.0], "q": [10.0]})
    a = NBow((0, 1), np.array([0.5, 0.5]), 2)
    b = NBow((0, 1), np.array([0.9, 0.1]), 2)
    c = cost_matrix(a, b, table)
    assert rwmd_lower_bound(a, b, c) == 0.0
    assert wcd_lower_bound(a, b, table) == pytest.approx(4.0)
    assert solve_exact(a, b, c).objective == pytest.approx(4.0)


def test_sinkhorn_single_cost():
    res = solve_sinkhorn([1.0], [1.0], np.array([[1.7]]), epsilon=0.3)
    assert abs(res.objective - 1.7) < 1e-6


def test_sinkhorn_identical_points():
    res = solve_sinkhorn([1.0], [1.0], np.array([[0.0]]), epsilon=0.1)
    assert res.objective <= 1e-9


def test_sinkhorn_close_to_exact_small_epsilon(rng):
    for _ in range(10):
        X, Y = rng.normal(size=(4, 5)), rng.normal(size=(4, 5))
        a, b = rng.random(4) + 0.1, rng.random(4) + 0.1
        a, b = a / a.sum(), b / b.sum()
        c = np.linalg.norm(X[:, None] - Y[None], axis=2)
        exact = solve_exact(a, b, c).objective
        res = solve_sinkhorn(a, b, c, epsilon=0.001, max_iter=20000)
        feasible(res, a, b, c)
        assert exact - 1e-7 <= res.objective <= exact * 1.01


def test_sinkhorn_nonconvergence_flag(rng):
    X, Y = rng.normal(size=(5, 3)), rng.normal(size=(5, 3))
    c = np.linalg.norm(X[:, None] - Y[None], axis=2)
    a = np.full(5, 0.2)
    b = np.array([0.5, 0.2, 0.1, 0.1, 0.1])
    res = solve_sinkhorn(a, b, c, epsilon=1e-4, max_iter=2)
    assert not res.converged and res.iterations == 2
    feasible(res, a, b, c)


def test_sinkhorn_bad_epsilon():
    with pytest.raises(ValueError):
        solve_sinkhorn([1.0], [1.0], np.array([[1.0]]), epsilon=0.0)


weights = st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6)


@settings(max_examples=80, deadline=None)
@given(weights, weights, st.integers(0, 2**32 - 1))
def test_solver_outputs_feasible(wa, wb, seed):
    r = np.random.default_rng(seed)
    a, b = np.array(wa) / sum(wa), np.array(wb) / sum(wb)
    c = r.random((len(a), len(b))) * 3
    exact = solve_exact(a, b, c)
    feasible(exact, a, b, c)
    approx = solve_sinkhorn(a, b, c, epsilon=0.05)
    feasible(approx, a, b, c)
    assert approx.objective >= exact.objective - 1e-7
