"""Graph and Laplacian primitives: validation, construction, random models.

Laplacians and weight matrices are plain dense ``numpy`` arrays; the
functions here enforce the combinatorial-Laplacian invariants (zero row
sums, nonpositive off-diagonals, PSD) instead of wrapping them in a class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

# Invariant tolerances for validate_laplacian.
ROW_SUM_TOL = 1e-9
OFFDIAG_TOL = 1e-12
EIG_TOL = 1e-8

CONNECT_RETRY_CAP = 1000


class InvalidGraphError(ValueError):
    """Input violates the weighted-graph or Laplacian invariants."""


class GraphGenerationError(RuntimeError):
    """Random graph sampling failed (connectivity retry cap exhausted)."""


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph stored as a dense adjacency matrix."""

    n_nodes: int
    weights: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.weights, dtype=float)
        if W.shape != (self.n_nodes, self.n_nodes):
            raise InvalidGraphError(
                f"weight matrix shape {W.shape} does not match n_nodes={self.n_nodes}"
            )
        if not np.array_equal(W, W.T):
            raise InvalidGraphError("weight matrix must be symmetric")
        if np.any(W < 0):
            raise InvalidGraphError("edge weights must be nonnegative")
        if np.any(np.diag(W) != 0):
            raise InvalidGraphError("self-loops are not allowed (nonzero diagonal)")
        object.__setattr__(self, "weights", W)

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, k=1)))


@dataclass(frozen=True)
class ErdosRenyi:
    p: float


@dataclass(frozen=True)
class StochasticBlock:
    n_blocks: int
    p_intra: float
    p_inter: float


@dataclass(frozen=True)
class WattsStrogatz:
    K: int
    p_rewire: float


GraphModel = Union[ErdosRenyi, StochasticBlock, WattsStrogatz]


@dataclass(frozen=True)
class GraphModelSpec:
    """Random graph family plus the uniform edge-weight law."""

    model: GraphModel
    n_nodes: int
    weight_low: float = 0.1
    weight_high: float = 2.0
    require_connected: bool = True

    def __post_init__(self):
        if self.n_nodes < 1:
            raise InvalidGraphError("n_nodes must be positive")
        if not (0 < self.weight_low < self.weight_high):
            raise InvalidGraphError("need 0 < weight_low < weight_high")
        probs = []
        if isinstance(self.model, ErdosRenyi):
            probs = [self.model.p]
        elif isinstance(self.model, StochasticBlock):
            probs = [self.model.p_intra, self.model.p_inter]
        elif isinstance(self.model, WattsStrogatz):
            probs = [self.model.p_rewire]
            if self.model.K < 1:
                raise InvalidGraphError("Watts-Strogatz K must be >= 1")
        else:
            raise InvalidGraphError(f"unknown graph model {self.model!r}")
        if any(not 0 <= p <= 1 for p in probs):
            raise InvalidGraphError("probabilities must lie in [0, 1]")


def validate_laplacian(L: np.ndarray, name: str = "L") -> np.ndarray:
    """Check the combinatorial-Laplacian invariants, returning L as float array.

    Raises InvalidGraphError on asymmetry, positive off-diagonals, nonzero
    row sums, or negative eigenvalues beyond tolerance.
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    if L.ndim != 2 or L.shape[1] != n:
        raise InvalidGraphError(f"{name} must be square, got shape {L.shape}")
    if not np.allclose(L, L.T, atol=1e-10, rtol=0):
        raise InvalidGraphError(f"{name} is not symmetric")
    scale = max(1.0, np.abs(L).max())
    row_sums = np.abs(L.sum(axis=1))
    if row_sums.max() > ROW_SUM_TOL * scale:
        raise InvalidGraphError(
            f"{name} row sums are not zero (max |sum| = {row_sums.max():.3e})"
        )
    off = L - np.diag(np.diag(L))
    if off.max() > OFFDIAG_TOL:
        raise InvalidGraphError(
            f"{name} has positive off-diagonal entries (max = {off.max():.3e})"
        )
    if n > 0 and np.trace(L) > 0:
        lam_min = float(np.linalg.eigvalsh(L)[0])
        if lam_min < -EIG_TOL * np.trace(L) / n:
            raise InvalidGraphError(f"{name} is not PSD (lambda_min = {lam_min:.3e})")
    return L


def build_laplacian(g: WeightedGraph) -> np.ndarray:
    """L = D - W for a valid weighted graph."""
    W = g.weights
    return np.diag(W.sum(axis=1)) - W


def weights_from_laplacian(L: np.ndarray) -> np.ndarray:
    """Recover the adjacency matrix W = -offdiag(L)."""
    W = -np.asarray(L, dtype=float).copy()
    np.fill_diagonal(W, 0.0)
    return W


def normalize_trace(L: np.ndarray) -> np.ndarray:
    """Rescale L so that trace(L) = N."""
    L = np.asarray(L, dtype=float)
    tr = np.trace(L)
    if tr <= 0:
        raise InvalidGraphError(f"cannot trace-normalize: trace = {tr}")
    return L * (L.shape[0] / tr)


def quadratic_form(L: np.ndarray, X: np.ndarray) -> float:
    """Tr(X^T L X), the Dirichlet energy of the columns of X on the graph."""
    L = np.asarray(L, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != L.shape[0]:
        raise InvalidGraphError(
            f"signal has {X.shape[0]} rows but Laplacian is {L.shape[0]}x{L.shape[0]}"
        )
    return float(np.einsum("ij,ik,jk->", L, X, X))


def path_laplacian(m: int) -> np.ndarray:
    """Unit-weight path graph Laplacian on m nodes (m-1 edges)."""
    if m < 2:
        raise InvalidGraphError("path graph needs at least 2 nodes")
    L = np.zeros((m, m))
    idx = np.arange(m - 1)
    L[idx, idx + 1] = -1.0
    L[idx + 1, idx] = -1.0
    np.fill_diagonal(L, -L.sum(axis=1) + np.diag(L))
    return L


def ring_laplacian(m: int) -> np.ndarray:
    """Unit-weight cycle graph Laplacian on m nodes (m edges)."""
    if m < 2:
        raise InvalidGraphError("ring graph needs at least 2 nodes")
    L = path_laplacian(m)
    L[0, -1] -= 1.0
    L[-1, 0] -= 1.0
    L[0, 0] += 1.0
    L[-1, -1] += 1.0
    return L


def cartesian_product_laplacian(L_G: np.ndarray, L_T: np.ndarray) -> np.ndarray:
    """Kronecker-sum Laplacian of the Cartesian product graph.

    With column-major vectorization x = vec(X) of an N x M signal, the
    product quadratic form splits as x^T L_J x = Tr(X^T L_G X) + Tr(X L_T X^T).
    """
    L_G = np.asarray(L_G, dtype=float)
    L_T = np.asarray(L_T, dtype=float)
    n, m = L_G.shape[0], L_T.shape[0]
    return np.kron(np.eye(m), L_G) + np.kron(L_T, np.eye(n))


def is_connected(W: np.ndarray) -> bool:
    """Connectivity of the graph given by adjacency matrix W (BFS)."""
    n = W.shape[0]
    if n == 0:
        return True
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(W[i] > 0)[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def _sample_topology(spec: GraphModelSpec, rng: np.random.Generator) -> np.ndarray:
    """Boolean adjacency of one topology draw (no weights yet)."""
    n = spec.n_nodes
    model = spec.model
    A = np.zeros((n, n), dtype=bool)
    if isinstance(model, ErdosRenyi):
        iu = np.triu_indices(n, k=1)
        mask = rng.random(len(iu[0])) < model.p
        A[iu] = mask
        A |= A.T
    elif isinstance(model, StochasticBlock):
        # Equal-size contiguous blocks; odd remainders go to the earlier blocks.
        sizes = [n // model.n_blocks] * model.n_blocks
        for k in range(n % model.n_blocks):
            sizes[k] += 1
        labels = np.repeat(np.arange(model.n_blocks), sizes)
        iu = np.triu_indices(n, k=1)
        same = labels[iu[0]] == labels[iu[1]]
        p = np.where(same, model.p_intra, model.p_inter)
        A[iu] = rng.random(len(iu[0])) < p
        A |= A.T
    elif isinstance(model, WattsStrogatz):
        K = model.K
        if n <= 2 * K:
            raise InvalidGraphError("Watts-Strogatz needs n_nodes > 2K")
        for i in range(n):
            for off in range(1, K + 1):
                j = (i + off) % n
                A[i, j] = A[j, i] = True
        # Visit lattice edges in fixed (node, offset) order; rewire the far
        # endpoint with probability p to a uniform non-neighbor.
        for i in range(n):
            for off in range(1, K + 1):
                j = (i + off) % n
                if rng.random() < model.p_rewire:
                    candidates = np.nonzero(~A[i])[0]
                    candidates = candidates[candidates != i]
                    if len(candidates) == 0:
                        continue
                    k = int(rng.choice(candidates))
                    A[i, j] = A[j, i] = False
                    A[i, k] = A[k, i] = True
    else:  # pragma: no cover - rejected in GraphModelSpec
        raise InvalidGraphError(f"unknown graph model {model!r}")
    return A


def sample_random_graph(spec: GraphModelSpec, rng: np.random.Generator) -> WeightedGraph:
    """Draw a topology from the named model, then i.i.d. U[low, high) weights.

    If require_connected, the topology is resampled until connected (cap
    CONNECT_RETRY_CAP draws).
    """
    for _ in range(CONNECT_RETRY_CAP):
        A = _sample_topology(spec, rng)
        if not spec.require_connected or is_connected(A.astype(float)):
            iu = np.triu_indices(spec.n_nodes, k=1)
            W = np.zeros((spec.n_nodes, spec.n_nodes))
            w = rng.uniform(spec.weight_low, spec.weight_high, size=len(iu[0]))
            W[iu] = np.where(A[iu], w, 0.0)
            W = W + W.T
            return WeightedGraph(spec.n_nodes, W)
    raise GraphGenerationError(
        f"failed to sample a connected graph in {CONNECT_RETRY_CAP} attempts"
    )


def save_matrix_csv(path, M: np.ndarray) -> None:
    """Dense CSV, one row per line, full float precision, no header."""
    np.savetxt(path, np.atleast_2d(np.asarray(M, dtype=float)), delimiter=",", fmt="%.17g")
