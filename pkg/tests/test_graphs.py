import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glen.graphs import (
    ErdosRenyi,
    GraphModelSpec,
    InvalidGraphError,
    StochasticBlock,
    WattsStrogatz,
    WeightedGraph,
    build_laplacian,
    cartesian_product_laplacian,
    is_connected,
    normalize_trace,
    path_laplacian,
    quadratic_form,
    ring_laplacian,
    sample_random_graph,
    validate_laplacian,
    weights_from_laplacian,
)


from _helpers import random_laplacian


def test_build_laplacian_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        L = random_laplacian(rng, 8)
        validate_laplacian(L)
        W = weights_from_laplacian(L)
        L2 = np.diag(W.sum(axis=1)) - W
        np.testing.assert_allclose(L, L2, atol=1e-12)


def test_validate_laplacian_rejects_bad_inputs():
    L = path_laplacian(4)
    with pytest.raises(InvalidGraphError):
        validate_laplacian(L + np.diag([0.1, 0, 0, 0]))  # row sums off
    bad = L.copy()
    bad[0, 1] = 0.5  # positive off-diagonal, asymmetric
    with pytest.raises(InvalidGraphError):
        validate_laplacian(bad)
    with pytest.raises(InvalidGraphError):
        validate_laplacian(L[:3])  # not square


def test_path_and_ring_oracles():
    np.testing.assert_allclose(
        path_laplacian(3),
        np.array([[1.0, -1, 0], [-1, 2, -1], [0, -1, 1]]),
    )
    np.testing.assert_allclose(
        ring_laplacian(4),
        np.array([[2.0, -1, 0, -1], [-1, 2, -1, 0], [0, -1, 2, -1], [-1, 0, -1, 2]]),
    )
    # ring eigenvalues: 2 - 2 cos(2 pi k / m)
    m = 7
    lam = np.sort(2.0 - 2.0 * np.cos(2 * np.pi * np.arange(m) / m))
    np.testing.assert_allclose(np.linalg.eigvalsh(ring_laplacian(m)), lam, atol=1e-10)


def test_cartesian_product_is_kronecker_sum():
    rng = np.random.default_rng(1)
    L_G = random_laplacian(rng, 5)
    L_T = path_laplacian(4)
    L_J = cartesian_product_laplacian(L_G, L_T)
    oracle = np.kron(np.eye(4), L_G) + np.kron(L_T, np.eye(5))
    np.testing.assert_allclose(L_J, oracle, atol=1e-12)
    validate_laplacian(L_J)


def test_normalize_trace():
    rng = np.random.default_rng(2)
    L = random_laplacian(rng, 6)
    Ln = normalize_trace(L)
    assert np.trace(Ln) == pytest.approx(6.0)
    np.testing.assert_allclose(Ln / np.trace(Ln) * 6, Ln)


def test_quadratic_form_oracle():
    rng = np.random.default_rng(3)
    L = random_laplacian(rng, 6)
    X = rng.standard_normal((6, 4))
    W = -L + np.diag(np.diag(L))
    val = 0.5 * sum(
        W[i, j] * np.sum((X[i] - X[j]) ** 2)
        for i in range(6) for j in range(6)
    )
    assert quadratic_form(L, X) == pytest.approx(float(np.trace(X.T @ L @ X)))
    assert quadratic_form(L, X) == pytest.approx(val)


def test_is_connected_oracle():
    from scipy.sparse.csgraph import connected_components

    rng = np.random.default_rng(4)
    for _ in range(50):
        n = rng.integers(2, 12)
        W = (rng.random((n, n)) < 0.2).astype(float)
        W = np.triu(W, 1)
        W = W + W.T
        n_comp, _ = connected_components(W, directed=False)
        assert is_connected(W) == (n_comp == 1)


@pytest.mark.parametrize("model", [
    ErdosRenyi(p=0.3),
    StochasticBlock(n_blocks=2, p_intra=0.5, p_inter=0.1),
    WattsStrogatz(K=2, p_rewire=0.1),
])
def test_sample_random_graph_properties(model):
    spec = GraphModelSpec(model, n_nodes=12)
    g1 = sample_random_graph(spec, np.random.default_rng(5))
    g2 = sample_random_graph(spec, np.random.default_rng(5))
    np.testing.assert_array_equal(g1.weights, g2.weights)  # deterministic
    W = g1.weights
    nz = W[W > 0]
    assert np.all(nz >= spec.weight_low - 1e-12)
    assert np.all(nz <= spec.weight_high + 1e-12)
    assert is_connected(W)
    L = build_laplacian(g1)
    validate_laplacian(L)


def test_weighted_graph_validation():
    with pytest.raises(InvalidGraphError):
        WeightedGraph(2, np.array([[0.0, 1.0], [2.0, 0.0]]))  # asymmetric
    with pytest.raises(InvalidGraphError):
        WeightedGraph(2, np.array([[1.0, 0.5], [0.5, 0.0]]))  # self-loop
    with pytest.raises(InvalidGraphError):
        WeightedGraph(3, np.zeros((2, 2)))  # shape mismatch


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=10), st.integers(min_value=0, max_value=10**6))
def test_random_laplacians_always_valid(n, seed):
    rng = np.random.default_rng(seed)
    L = random_laplacian(rng, n)
    validate_laplacian(L)
    lam = np.linalg.eigvalsh(L)
    assert lam[0] >= -1e-8
    assert abs(L @ np.ones(n)).max() < 1e-10
