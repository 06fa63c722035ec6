"""Synthetic signal generation: low-pass filtered latents plus family noise.

Latent signals are white noise pushed through the square-root
pseudo-inverse filter of a Laplacian, so their covariance is the
Laplacian's pseudo-inverse; observations overlay exponential-family
noise through the natural parameter eta = y + mu.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .families import NATURAL_PARAM_CAP, ExponentialFamily, family_from_tag
from .graphs import (
    GraphModelSpec,
    ErdosRenyi,
    StochasticBlock,
    WattsStrogatz,
    build_laplacian,
    cartesian_product_laplacian,
    normalize_trace,
    sample_random_graph,
    save_matrix_csv,
)


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator keyed by (seed, *key).

    Identical keys give bit-identical streams regardless of process or
    call order, so parallel and serial generation agree.
    """
    return np.random.default_rng(np.random.SeedSequence([seed % 2**64, *key]))


@dataclass(frozen=True)
class FilterOperator:
    """Spectral graph filter U diag(gain) U^T with an explicit null space."""

    n_nodes: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    filter_diag: np.ndarray
    eig_tolerance: float

    @property
    def matrix(self) -> np.ndarray:
        return (self.eigenvectors * self.filter_diag) @ self.eigenvectors.T

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self.matrix @ X


def sqrt_pinv_filter(L: np.ndarray, rel_eig_tolerance: float = 1e-8) -> FilterOperator:
    """Filter with gain lambda^{-1/2} on eigenvalues above tolerance, 0 below.

    The squared filter is the Moore-Penrose pseudo-inverse of L; for a
    connected graph exactly the constant mode is suppressed.
    """
    L = np.asarray(L, dtype=float)
    lam, U = np.linalg.eigh(L)
    tol = rel_eig_tolerance * max(lam[-1], 0.0) if L.shape[0] else 0.0
    gains = np.where(lam > tol, 1.0 / np.sqrt(np.maximum(lam, 1e-300)), 0.0)
    return FilterOperator(L.shape[0], lam, U, gains, tol)


def sample_smooth(F: FilterOperator, M: int, rng: np.random.Generator) -> np.ndarray:
    """N x M matrix of independent smooth columns F @ white noise."""
    X0 = rng.standard_normal((F.n_nodes, M))
    return F.apply(X0)


def two_level_offset(N: int) -> np.ndarray:
    """Offset +2 on the first floor(N/2) nodes and -2 on the rest."""
    mu = np.full(N, -2.0)
    mu[: N // 2] = 2.0
    return mu


def sample_timevertex_smooth(
    L_G: np.ndarray, L_T: np.ndarray, gamma: float, rng: np.random.Generator
) -> np.ndarray:
    """Temporally correlated smooth matrix signal on the product graph.

    White noise is filtered through sqrt(pinv(L_G (+) gamma L_T)) and the
    vectorized sample reshaped column-major into N x M.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n, m = L_G.shape[0], L_T.shape[0]
    L_J = cartesian_product_laplacian(L_G, gamma * np.asarray(L_T, dtype=float))
    F = sqrt_pinv_filter(L_J)
    y = F.apply(rng.standard_normal(n * m))
    return y.reshape((n, m), order="F")


@dataclass(frozen=True)
class SignalDataset:
    """Observations plus optional generating ground truth."""

    X: np.ndarray
    L0: Optional[np.ndarray] = None
    Y: Optional[np.ndarray] = None
    mu: Optional[np.ndarray] = None

    @property
    def n_nodes(self) -> int:
        return self.X.shape[0]

    @property
    def n_signals(self) -> int:
        return self.X.shape[1]


def sample_observations(
    fam: ExponentialFamily,
    Y: np.ndarray,
    mu: np.ndarray,
    rng: np.random.Generator,
    L0: Optional[np.ndarray] = None,
) -> SignalDataset:
    """Entrywise family draws at eta = Y + mu 1^T (capped at +-30)."""
    Y = np.asarray(Y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    eta = np.clip(Y + mu[:, None], -NATURAL_PARAM_CAP, NATURAL_PARAM_CAP)
    if fam.kind == "negbinomial":
        eta = np.minimum(eta, -1e-9)
    X = np.asarray(fam.sample(eta, rng))
    if fam.is_discrete:
        X = X.astype(np.int64)
    return SignalDataset(X=X, L0=L0, Y=Y, mu=mu)


OffsetSpec = Union[str, Sequence[float]]


@dataclass(frozen=True)
class SyntheticDatasetSpec:
    """Everything needed to regenerate one synthetic dataset."""

    graph_spec: GraphModelSpec
    family: str = "poisson"
    n_signals: int = 2000
    offset: OffsetSpec = "two-level"
    seed: int = 0

    def __post_init__(self):
        if self.n_signals < 1:
            raise ValueError("n_signals must be >= 1")


def resolve_offset(offset: OffsetSpec, N: int) -> np.ndarray:
    if isinstance(offset, str):
        if offset == "two-level":
            return two_level_offset(N)
        if offset == "zero":
            return np.zeros(N)
        raise ValueError(f"unknown offset spec {offset!r}")
    mu = np.asarray(offset, dtype=float)
    if mu.shape != (N,):
        raise ValueError(f"offset vector must have length {N}")
    return mu


# Stream ids for the independent random stages of dataset generation.
_STREAM_GRAPH = 1
_STREAM_SMOOTH = 2
_STREAM_NOISE = 3


def generate_dataset(spec: SyntheticDatasetSpec, graph_index: int = 0) -> SignalDataset:
    """Sample graph, smooth latents, and noisy observations, deterministically.

    Streams are keyed by (seed, graph_index, stage) so datasets for
    different graphs can be produced independently in any order.
    """
    fam = family_from_tag(spec.family)
    g = sample_random_graph(
        spec.graph_spec, stream_rng(spec.seed, graph_index, _STREAM_GRAPH)
    )
    L0 = normalize_trace(build_laplacian(g))
    N = spec.graph_spec.n_nodes
    mu = resolve_offset(spec.offset, N)
    F = sqrt_pinv_filter(L0)
    Y = sample_smooth(F, spec.n_signals, stream_rng(spec.seed, graph_index, _STREAM_SMOOTH))
    return sample_observations(
        fam, Y, mu, stream_rng(spec.seed, graph_index, _STREAM_NOISE), L0=L0
    )


# -- serialization ---------------------------------------------------------


def _model_to_json(spec: GraphModelSpec) -> dict:
    m = spec.model
    if isinstance(m, ErdosRenyi):
        model = {"name": "erdos-renyi", "p": m.p}
    elif isinstance(m, StochasticBlock):
        model = {"name": "stochastic-block", "n_blocks": m.n_blocks,
                 "p_intra": m.p_intra, "p_inter": m.p_inter}
    else:
        model = {"name": "watts-strogatz", "K": m.K, "p_rewire": m.p_rewire}
    return {
        "model": model,
        "n_nodes": spec.n_nodes,
        "weight_low": spec.weight_low,
        "weight_high": spec.weight_high,
        "require_connected": spec.require_connected,
    }


def graph_spec_from_json(d: dict) -> GraphModelSpec:
    m = d["model"]
    name = m["name"]
    if name == "erdos-renyi":
        model = ErdosRenyi(p=m["p"])
    elif name == "stochastic-block":
        model = StochasticBlock(n_blocks=m.get("n_blocks", 2),
                                p_intra=m["p_intra"], p_inter=m["p_inter"])
    elif name == "watts-strogatz":
        model = WattsStrogatz(K=m["K"], p_rewire=m["p_rewire"])
    else:
        raise ValueError(f"unknown graph model name {name!r}")
    return GraphModelSpec(
        model=model,
        n_nodes=d["n_nodes"],
        weight_low=d.get("weight_low", 0.1),
        weight_high=d.get("weight_high", 2.0),
        require_connected=d.get("require_connected", True),
    )


def save_dataset(ds: SignalDataset, out_dir, spec: Optional[SyntheticDatasetSpec] = None,
                 graph_index: int = 0) -> None:
    """Write X.csv (plus ground truth and manifest when available)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix_csv(out / "X.csv", ds.X)
    if ds.Y is not None:
        save_matrix_csv(out / "Y.csv", ds.Y)
    if ds.mu is not None:
        save_matrix_csv(out / "mu.csv", ds.mu[None, :])
    if ds.L0 is not None:
        save_matrix_csv(out / "L0.csv", ds.L0)
    manifest = {"n_nodes": int(ds.n_nodes), "n_signals": int(ds.n_signals)}
    if spec is not None:
        manifest.update(
            graph_spec=_model_to_json(spec.graph_spec),
            family=spec.family,
            offset=spec.offset if isinstance(spec.offset, str) else list(spec.offset),
            seed=spec.seed,
            graph_index=graph_index,
        )
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
