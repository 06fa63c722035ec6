import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _helpers import random_laplacian
from glen.cgl import (
    CglProblem,
    StatisticError,
    cgl_objective,
    empirical_statistic,
    laplacian_from_weights,
    solve_cgl,
    type1_regularizer,
    vi_statistic,
    weights_from_laplacian_vec,
)
from glen.graphs import validate_laplacian


def test_type1_regularizer():
    H = type1_regularizer(3)
    np.testing.assert_array_equal(H, [[1, -1, -1], [-1, 1, -1], [-1, -1, 1]])


def test_cgl_objective_oracle():
    rng = np.random.default_rng(0)
    L = random_laplacian(rng, 6)
    S = np.linalg.pinv(L) + 0.1 * np.eye(6)
    prob = CglProblem(S, alpha=0.05)
    n = 6
    sign, ld = np.linalg.slogdet(L + np.ones((n, n)) / n)
    oracle = (np.sum(L * S) - ld
              + 0.05 * np.abs(L * type1_regularizer(n)).sum())
    assert cgl_objective(L, prob) == pytest.approx(oracle, abs=1e-10)
    # l1 of a valid Laplacian against H equals 2 Tr(L)
    assert np.abs(L * type1_regularizer(n)).sum() == pytest.approx(2 * np.trace(L))


def test_cgl_objective_infinite_when_disconnected():
    L = np.zeros((4, 4))
    prob = CglProblem(np.eye(4))
    assert cgl_objective(L, prob) == np.inf


def test_statistic_validation():
    with pytest.raises(StatisticError):
        CglProblem(np.array([[1.0, 2.0], [0.0, 1.0]]))  # asymmetric
    with pytest.raises(StatisticError):
        CglProblem(np.array([[1.0, 2.0], [2.0, 1.0]]))  # indefinite
    with pytest.raises(StatisticError):
        CglProblem(np.ones((2, 3)))
    with pytest.raises(ValueError):
        CglProblem(np.eye(2), alpha=-0.1)


def test_empirical_and_vi_statistics():
    rng = np.random.default_rng(1)
    Y = rng.standard_normal((5, 40))
    S = empirical_statistic(Y)
    np.testing.assert_allclose(S, Y @ Y.T / 40, atol=1e-12)
    np.testing.assert_allclose(vi_statistic(Y, 0.3), S + 0.3 * np.eye(5), atol=1e-12)
    with pytest.raises(ValueError):
        vi_statistic(Y, 0.0)


def test_weight_round_trip():
    rng = np.random.default_rng(2)
    L = random_laplacian(rng, 7)
    w = weights_from_laplacian_vec(L)
    np.testing.assert_allclose(laplacian_from_weights(w, 7), L, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=10**6))
def test_laplacian_from_weights_always_valid(n, seed):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.0, 2.0, n * (n - 1) // 2)
    L = laplacian_from_weights(w, n)
    assert abs(L @ np.ones(n)).max() < 1e-10
    assert np.all(L - np.diag(np.diag(L)) <= 1e-12)
    np.testing.assert_allclose(L, L.T)


def test_solve_cgl_stationarity_certificate():
    rng = np.random.default_rng(3)
    L0 = random_laplacian(rng, 8)
    S = np.linalg.inv(L0 + np.ones((8, 8)) / 8)
    sol = solve_cgl(CglProblem(S, alpha=0.02), tol=1e-7)
    assert sol.converged
    validate_laplacian(sol.laplacian)
    # KKT at the reported solution: zero-weight edges have nonnegative
    # gradient, active edges near-zero gradient.
    n = 8
    iu = np.triu_indices(n, k=1)
    P = np.linalg.inv(sol.laplacian + np.ones((n, n)) / n)
    H = type1_regularizer(n)
    Habs = np.abs(H)
    cost = (np.diag(S)[iu[0]] + np.diag(S)[iu[1]] - 2 * S[iu]
            + 0.02 * (np.diag(Habs)[iu[0]] + np.diag(Habs)[iu[1]] + 2 * Habs[iu]))
    g = cost - (np.diag(P)[iu[0]] + np.diag(P)[iu[1]] - 2 * P[iu])
    scale = max(np.abs(cost).max(), 1.0)
    active = sol.weights > 0
    assert np.abs(g[active]).max(initial=0.0) <= 1e-6 * scale
    assert g[~active].min(initial=0.0) >= -1e-6 * scale


def test_solve_cgl_warm_start_agrees_with_cold():
    rng = np.random.default_rng(4)
    L0 = random_laplacian(rng, 6)
    S = np.linalg.inv(L0 + np.ones((6, 6)) / 6)
    prob = CglProblem(S, alpha=0.05)
    cold = solve_cgl(prob, tol=1e-8)
    warm = solve_cgl(prob, tol=1e-8, w0=weights_from_laplacian_vec(L0) * 1.3)
    assert cold.objective == pytest.approx(warm.objective, abs=1e-6)
    np.testing.assert_allclose(cold.laplacian, warm.laplacian, atol=1e-4)


def test_solve_cgl_recovers_from_disconnected_warm_start():
    rng = np.random.default_rng(5)
    L0 = random_laplacian(rng, 5)
    S = np.linalg.inv(L0 + np.ones((5, 5)) / 5)
    sol = solve_cgl(CglProblem(S), w0=np.zeros(10))
    assert np.isfinite(sol.objective)
    validate_laplacian(sol.laplacian)


def test_solve_cgl_alpha_shrinks_total_weight():
    rng = np.random.default_rng(6)
    L0 = random_laplacian(rng, 8)
    S = np.linalg.inv(L0 + np.ones((8, 8)) / 8)
    t_small = np.trace(solve_cgl(CglProblem(S, alpha=0.01)).laplacian)
    t_large = np.trace(solve_cgl(CglProblem(S, alpha=0.5)).laplacian)
    assert t_large < t_small
