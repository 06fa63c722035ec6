"""Alternating estimator: L-step (CGL), Y-step (constrained Newton), mu-step.

The composite objective that every block descends is

    J = -Tr((Y^T + 1 mu^T) X) + sum A(Y + mu 1^T) + gamma Tr(Y L_T Y^T)
        + (beta/2) [Tr(Y^T L Y) + M alpha ||L o H||_1 - M log det(L + J1)]
        (+ (beta/2) M lam Tr(L) in the variational variant,
         where the A-sum becomes its Gaussian-posterior expectation),

with J1 = (1/N) 1 1^T.  The Y-step minimizes the per-column part with
gradient -x_j + A'(mu + y_j) + beta L y_j, the mu-step refits the
per-node intercept, and the L-step solves the CGL problem on the
statistic (1/M) Y Y^T (plus lam I for the variational variant) -- each
an exact minimizer of J in its own block, so the recorded trace is
non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_hermite

from .cgl import (
    CglProblem,
    cgl_objective,
    empirical_statistic,
    solve_cgl,
    type1_regularizer,
    vi_statistic,
    weights_from_laplacian_vec,
)
from .families import (
    NATURAL_PARAM_CAP,
    ExponentialFamily,
    FamilyDomainError,
    family_from_tag,
    fit_scalar_offset_glm,
)
from .graphs import path_laplacian, ring_laplacian, validate_laplacian

_GH_NODES = 20


class DegenerateDataError(ValueError):
    """Input matrix carries no usable variation for initialization."""


@dataclass(frozen=True)
class GlenConfig:
    family: str = "poisson"
    alpha: float = 0.01
    beta: float = 1.0
    gamma: float = 0.0
    variant: str = "map"  # "map" or "vi"
    vi_lambda: float = 0.5
    temporal_graph: str = "path"  # "path" or "ring"
    outer_max_iter: int = 50
    outer_rel_tol: float = 1e-5
    newton_max_iter: int = 50
    newton_grad_tol: float = 1e-6
    newton_step_init: float = 1.0
    armijo_c: float = 1e-4
    min_step: float = 1e-10
    lstep_tol: float = 1e-6
    lstep_max_iter: int = 10000

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.variant not in ("map", "vi"):
            raise ValueError("variant must be 'map' or 'vi'")
        if self.variant == "vi" and self.vi_lambda <= 0:
            raise ValueError("vi_lambda must be positive")
        if self.temporal_graph not in ("path", "ring"):
            raise ValueError("temporal_graph must be 'path' or 'ring'")


@dataclass
class GlenState:
    L: np.ndarray
    Y: np.ndarray
    mu: np.ndarray
    objective_trace: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


# -- effective log-partition (MAP vs variational) --------------------------


def vi_expected_log_partition(fam: ExponentialFamily, y, mu, lam: float):
    """E[A(eta + Z)] with Z ~ N(0, lam), at eta = y + mu.

    Poisson and Gaussian are closed form; Bernoulli and Binomial use
    Gauss-Hermite quadrature.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    eta = np.asarray(y, dtype=float) + np.asarray(mu, dtype=float)
    if fam.kind == "poisson":
        out = np.exp(eta + lam / 2.0)
    elif fam.kind == "gaussian":
        out = 0.5 * eta**2 + lam / 2.0
    elif fam.kind in ("bernoulli", "binomial"):
        out = _gh_expectation(fam.log_partition, eta, lam)
    else:
        raise FamilyDomainError(
            f"no expected log-partition for family {fam.kind!r}"
        )
    return out if np.ndim(out) else float(out)


def _gh_expectation(f: Callable, eta: np.ndarray, lam: float) -> np.ndarray:
    nodes, weights = roots_hermite(_GH_NODES)
    shift = np.sqrt(2.0 * lam) * nodes
    eta = np.asarray(eta, dtype=float)
    vals = f(eta[..., None] + shift)
    return vals @ (weights / np.sqrt(np.pi))


def _effective_partition(fam: ExponentialFamily, cfg: GlenConfig):
    """(A, A', A'') of the block objectives; expectations under q for VI."""
    if cfg.variant == "map":
        return fam.log_partition, fam.mean, fam.variance
    lam = cfg.vi_lambda
    if fam.kind == "poisson":
        c = np.exp(lam / 2.0)

        def a0(eta):
            return c * np.exp(eta)

        return a0, a0, a0
    if fam.kind == "gaussian":
        return (
            lambda eta: 0.5 * np.asarray(eta, float) ** 2 + lam / 2.0,
            lambda eta: np.asarray(eta, float),
            lambda eta: np.ones_like(np.asarray(eta, float)),
        )
    if fam.kind in ("bernoulli", "binomial"):
        return (
            lambda eta: _gh_expectation(fam.log_partition, eta, lam),
            lambda eta: _gh_expectation(fam.mean, eta, lam),
            lambda eta: _gh_expectation(fam.variance, eta, lam),
        )
    raise FamilyDomainError(f"variational variant unsupported for {fam.kind!r}")


def temporal_laplacian(cfg: GlenConfig, m: int) -> np.ndarray:
    if cfg.temporal_graph == "ring":
        return ring_laplacian(m)
    return path_laplacian(m)


# -- objective -------------------------------------------------------------


def glen_objective(state: GlenState, X: np.ndarray, cfg: GlenConfig) -> float:
    """Composite objective descended by the alternating blocks."""
    fam = family_from_tag(cfg.family)
    a0, _, _ = _effective_partition(fam, cfg)
    Y, mu, L = state.Y, state.mu, state.L
    n, m = X.shape
    eta = Y + mu[:, None]
    if np.abs(eta).max() > NATURAL_PARAM_CAP + 1e-9:
        bad = np.unravel_index(np.abs(eta).argmax(), eta.shape)
        raise FamilyDomainError(
            f"natural parameter out of range at entry {bad}: {eta[bad]:.3f}"
        )
    fam.check_support(X)
    fidelity = -float(np.sum(eta * X)) + float(np.sum(a0(eta)))
    smooth = float(np.einsum("ij,ik,jk->", L, Y, Y))
    l1 = float(np.abs(L * type1_regularizer(n)).sum())
    ld = _logdet(L)
    lterms = smooth + m * cfg.alpha * l1 - m * ld
    if cfg.variant == "vi":
        lterms += m * cfg.vi_lambda * float(np.trace(L))
    obj = fidelity + 0.5 * cfg.beta * lterms
    if cfg.gamma > 0:
        L_T = temporal_laplacian(cfg, m)
        obj += cfg.gamma * float(np.einsum("ij,ki,kj->", L_T, Y, Y))
    return obj


def _logdet(L: np.ndarray) -> float:
    n = L.shape[0]
    sign, ld = np.linalg.slogdet(L + np.ones((n, n)) / n)
    if sign <= 0:
        return -np.inf
    return float(ld)


# -- Y-step ----------------------------------------------------------------


def y_step_gradient(state: GlenState, X: np.ndarray, cfg: GlenConfig, j: int) -> np.ndarray:
    """Gradient of the per-column objective at column j."""
    fam = family_from_tag(cfg.family)
    _, a1, _ = _effective_partition(fam, cfg)
    y = state.Y[:, j]
    g = -X[:, j] + a1(y + state.mu) + cfg.beta * (state.L @ y)
    if cfg.gamma > 0:
        L_T = temporal_laplacian(cfg, state.Y.shape[1])
        g = g + 2.0 * cfg.gamma * (state.Y @ L_T[:, j])
    return g


def y_step_hessian(state: GlenState, cfg: GlenConfig, j: int) -> np.ndarray:
    """Hessian of the per-column objective at column j."""
    fam = family_from_tag(cfg.family)
    _, _, a2 = _effective_partition(fam, cfg)
    H = np.diag(a2(state.Y[:, j] + state.mu)) + cfg.beta * state.L
    if cfg.gamma > 0:
        L_T = temporal_laplacian(cfg, state.Y.shape[1])
        H = H + 2.0 * cfg.gamma * L_T[j, j] * np.eye(state.Y.shape[0])
    return H


def constrained_newton_direction(hessian: np.ndarray, gradient: np.ndarray) -> Tuple[np.ndarray, float]:
    """Solve the equality-constrained Newton system.

    [[H, 1], [1^T, 0]] [v; w] = [-g; 0]; on a singular system the caller
    falls back to the projected gradient direction.
    """
    n = len(gradient)
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = hessian
    A[:n, n] = 1.0
    A[n, :n] = 1.0
    rhs = np.concatenate([-gradient, [0.0]])
    sol = np.linalg.solve(A, rhs)
    return sol[:n], float(sol[n])


def _column_objectives(
    Yc: np.ndarray, mu: np.ndarray, X: np.ndarray, L: np.ndarray, beta: float, a0,
    eta_hi: float = NATURAL_PARAM_CAP,
) -> np.ndarray:
    """Per-column objective values; +inf where the natural-parameter cap trips."""
    eta = Yc + mu[:, None]
    over = (eta.max(axis=0) > eta_hi) | (eta.min(axis=0) < -NATURAL_PARAM_CAP)
    eta_safe = np.clip(eta, -NATURAL_PARAM_CAP, eta_hi)
    phi = (-np.sum(eta * X, axis=0) + np.sum(a0(eta_safe), axis=0)
           + 0.5 * beta * np.sum(Yc * (L @ Yc), axis=0))
    phi[over] = np.inf
    return phi


def _batch_newton(
    Y: np.ndarray,
    mu: np.ndarray,
    X: np.ndarray,
    L: np.ndarray,
    cfg: GlenConfig,
    a0,
    a1,
    a2,
) -> np.ndarray:
    """Damped Newton on every column simultaneously (no temporal coupling).

    Columns share the smoothness operator but have their own Hessian
    diagonals, step sizes, and stopping status; the KKT systems are
    solved as one batched dense solve per Newton iteration.
    """
    n, m = Y.shape
    Y = Y.copy()
    beta = cfg.beta
    fam = family_from_tag(cfg.family)
    eta_hi = -1e-12 if fam.kind == "negbinomial" else NATURAL_PARAM_CAP
    phi = _column_objectives(Y, mu, X, L, beta, a0, eta_hi)
    active = np.ones(m, dtype=bool)
    for _ in range(cfg.newton_max_iter):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        eta = Y[:, idx] + mu[:, None]
        G = -X[:, idx] + a1(eta) + beta * (L @ Y[:, idx])
        PG = G - G.mean(axis=0, keepdims=True)
        done = np.abs(PG).max(axis=0) <= cfg.newton_grad_tol
        active[idx[done]] = False
        idx = idx[~done]
        if len(idx) == 0:
            break
        G = G[:, ~done]
        k = len(idx)
        A = np.zeros((k, n + 1, n + 1))
        A[:, :n, :n] = beta * L
        diag = np.arange(n)
        A[:, diag, diag] += a2(Y[:, idx] + mu[:, None]).T
        A[:, :n, n] = 1.0
        A[:, n, :n] = 1.0
        rhs = np.zeros((k, n + 1))
        rhs[:, :n] = -G.T
        try:
            V = np.linalg.solve(A, rhs[..., None])[:, :n, 0].T
        except np.linalg.LinAlgError:
            V = -(G - G.mean(axis=0, keepdims=True))
        gv = np.sum(G * V, axis=0)
        # Backtracking per column.
        t = np.full(k, cfg.newton_step_init)
        remaining = np.ones(k, dtype=bool)
        Y_new = Y[:, idx].copy()
        phi_old = phi[idx]
        while remaining.any():
            cand = Y[:, idx[remaining]] + t[remaining] * V[:, remaining]
            phi_c = _column_objectives(cand, mu, X[:, idx[remaining]], L, beta, a0, eta_hi)
            ok = phi_c <= phi_old[remaining] + cfg.armijo_c * t[remaining] * gv[remaining]
            rem_idx = np.nonzero(remaining)[0]
            acc = rem_idx[ok]
            Y_new[:, acc] = cand[:, ok]
            phi_old[acc] = phi_c[ok]
            remaining[acc] = False
            t[rem_idx[~ok]] *= 0.5
            stalled = rem_idx[~ok][t[rem_idx[~ok]] < cfg.min_step]
            if len(stalled):
                # Keep the current column and stop iterating on it.
                remaining[stalled] = False
                active[idx[stalled]] = False
        Y[:, idx] = Y_new
        phi[idx] = phi_old
    return Y


def _single_column_newton(
    y: np.ndarray,
    mu: np.ndarray,
    x: np.ndarray,
    L: np.ndarray,
    cfg: GlenConfig,
    a0,
    a1,
    a2,
    tv_cross: Optional[np.ndarray] = None,
    tv_diag: float = 0.0,
) -> np.ndarray:
    """Newton solve for one column, with optional fixed temporal coupling.

    tv_cross is the constant part of the temporal gradient,
    2 gamma sum_{k != j} (L_T)_{kj} y_k, and tv_diag = 2 gamma (L_T)_{jj}.
    """
    y = y.copy()
    beta = cfg.beta

    def phi(yv):
        eta = yv + mu
        if np.abs(eta).max() > NATURAL_PARAM_CAP:
            return np.inf
        val = -float(eta @ x) + float(np.sum(a0(eta))) + 0.5 * beta * float(yv @ (L @ yv))
        if tv_cross is not None:
            val += 0.5 * tv_diag * float(yv @ yv) + float(tv_cross @ yv)
        return val

    f = phi(y)
    for _ in range(cfg.newton_max_iter):
        eta = y + mu
        g = -x + a1(eta) + beta * (L @ y)
        if tv_cross is not None:
            g = g + tv_diag * y + tv_cross
        pg = g - g.mean()
        if np.abs(pg).max() <= cfg.newton_grad_tol:
            break
        H = np.diag(a2(eta)) + beta * L
        if tv_cross is not None:
            H = H + tv_diag * np.eye(len(y))
        try:
            v, _ = constrained_newton_direction(H, g)
        except np.linalg.LinAlgError:
            v = -pg
        gv = float(g @ v)
        t = cfg.newton_step_init
        while True:
            f_new = phi(y + t * v)
            if f_new <= f + cfg.armijo_c * t * gv:
                y = y + t * v
                f = f_new
                break
            t *= 0.5
            if t < cfg.min_step:
                return y  # stalled; keep the current column
    return y


def y_step(state: GlenState, X: np.ndarray, cfg: GlenConfig) -> GlenState:
    """Minimize the composite over Y at fixed (L, mu).

    Without temporal coupling the columns are independent and solved in
    one vectorized batch; with coupling, one left-to-right Gauss-Seidel
    sweep of fully converged per-column solves.
    """
    fam = family_from_tag(cfg.family)
    a0, a1, a2 = _effective_partition(fam, cfg)
    if cfg.gamma == 0:
        Y = _batch_newton(state.Y, state.mu, X, state.L, cfg, a0, a1, a2)
        return replace_state(state, Y=Y)
    m = state.Y.shape[1]
    L_T = temporal_laplacian(cfg, m)
    Y = state.Y.copy()
    for j in range(m):
        cross = 2.0 * cfg.gamma * (Y @ L_T[:, j] - L_T[j, j] * Y[:, j])
        Y[:, j] = _single_column_newton(
            Y[:, j], state.mu, X[:, j], state.L, cfg, a0, a1, a2,
            tv_cross=cross, tv_diag=2.0 * cfg.gamma * L_T[j, j],
        )
    return replace_state(state, Y=Y)


def replace_state(state: GlenState, **kw) -> GlenState:
    out = GlenState(
        L=kw.get("L", state.L),
        Y=kw.get("Y", state.Y),
        mu=kw.get("mu", state.mu),
        objective_trace=state.objective_trace,
        iterations=state.iterations,
        converged=state.converged,
    )
    return out


# -- mu-step ---------------------------------------------------------------


def _fit_intercept(a1, x: np.ndarray, y: np.ndarray, hi_cap: float) -> float:
    """Root of the monotone score sum(a1(mu + y) - x) on the capped bracket."""
    lo, hi = -NATURAL_PARAM_CAP, hi_cap

    def score(mu):
        return float(np.sum(a1(mu + y) - x))

    if score(lo) >= 0:
        return lo
    if score(hi) <= 0:
        return hi
    return float(brentq(score, lo, hi, xtol=1e-12, rtol=1e-14))


def mu_step(state: GlenState, X: np.ndarray, cfg: GlenConfig) -> GlenState:
    """Per-node intercept refit at fixed Y."""
    fam = family_from_tag(cfg.family)
    mu = np.empty_like(state.mu)
    if cfg.variant == "map":
        for i in range(len(mu)):
            mu[i] = fit_scalar_offset_glm(fam, X[i], state.Y[i])
    else:
        _, a1, _ = _effective_partition(fam, cfg)
        hi = NATURAL_PARAM_CAP
        if fam.kind == "negbinomial":
            hi = float(-state.Y.max()) - 1e-9
        for i in range(len(mu)):
            mu[i] = _fit_intercept(a1, X[i], state.Y[i], hi)
    # Keep eta = mu + y inside the natural-parameter cap; the row objective
    # is convex in mu, so clipping yields the constrained minimizer.
    lo = -NATURAL_PARAM_CAP - state.Y.min(axis=1)
    hi = NATURAL_PARAM_CAP - state.Y.max(axis=1)
    mu = np.clip(mu, np.minimum(lo, hi), hi)
    return replace_state(state, mu=mu)


# -- L-step ----------------------------------------------------------------


def l_step(state: GlenState, cfg: GlenConfig) -> GlenState:
    """CGL solve on the current statistic, warm-started at the current L."""
    if cfg.variant == "vi":
        S = vi_statistic(state.Y, cfg.vi_lambda)
    else:
        S = empirical_statistic(state.Y)
    prob = CglProblem(S, cfg.alpha)
    w0 = weights_from_laplacian_vec(state.L) if state.L is not None else None
    sol = solve_cgl(prob, tol=cfg.lstep_tol, max_iter=cfg.lstep_max_iter, w0=w0)
    return replace_state(state, L=sol.laplacian)


# -- closed forms and exports ----------------------------------------------


def gaussian_closed_form_y(X: np.ndarray, mu: np.ndarray, L: np.ndarray, beta: float) -> np.ndarray:
    """Constraint-respecting Tikhonov filter (I + beta L)^{-1} of centered X."""
    Xc = X - np.asarray(mu, float)[:, None]
    Xc = Xc - Xc.mean(axis=0, keepdims=True)
    n = L.shape[0]
    return np.linalg.solve(np.eye(n) + beta * np.asarray(L, float), Xc)


def denoised_means(state: GlenState, cfg: GlenConfig) -> np.ndarray:
    """Inverse link of the natural parameter, entrywise."""
    fam = family_from_tag(cfg.family)
    return fam.mean(state.Y + state.mu[:, None])


# -- initialization and driver ---------------------------------------------


def _logit(p):
    return np.log(p) - np.log1p(-p)


def _covariance_match(Z: np.ndarray, Sigma: np.ndarray) -> np.ndarray:
    """Recolor Z so its sample covariance equals the PSD part of Sigma.

    Applies the symmetric transform Sigma^{1/2} C^{-1/2} with C = Z Z^T / m,
    using pseudo-roots so rank-deficient directions (the centered constant
    mode) stay at zero.  The transform is the closest-to-identity map with
    this property, so the recolored rows stay aligned with the data.
    """
    m = Z.shape[1]
    lam_c, U_c = np.linalg.eigh(Z @ Z.T / m)
    tol_c = 1e-12 * max(lam_c[-1], 0.0)
    inv_root_c = (U_c * np.where(lam_c > tol_c, 1.0 / np.sqrt(np.maximum(lam_c, 1e-300)), 0.0)) @ U_c.T
    lam_s, U_s = np.linalg.eigh((Sigma + Sigma.T) / 2.0)
    root_s = (U_s * np.sqrt(np.maximum(lam_s, 0.0))) @ U_s.T
    return root_s @ inv_root_c @ Z


def initialize_state(X: np.ndarray, cfg: GlenConfig) -> GlenState:
    """Family-appropriate moment-matching start with the column constraint."""
    fam = family_from_tag(cfg.family)
    fam.check_support(X)
    X = np.asarray(X, dtype=float)
    if X.size == 0 or np.ptp(X) == 0 and fam.kind != "gaussian" and X.max() == 0:
        raise DegenerateDataError("input matrix is identically zero")
    n, m = X.shape
    if fam.kind == "poisson":
        # Method-of-moments start for a log-normal latent rate: with
        # x ~ Poisson(e^{mu+y}), y ~ N(0, Sigma), the count moments give
        # E[x_i] = e^{mu_i + Sigma_ii/2} and
        # Cov(x_i, x_j) = m_i m_j (e^{Sigma_ij} - 1) + delta_ij m_i,
        # so both mu and the full latent covariance are identified.  The
        # naive log-row-mean overestimates mu by Sigma_ii/2 and the raw
        # log-count covariance carries the shot noise on its diagonal; the
        # alternation is slow to undo either.
        m1 = np.maximum(X.mean(axis=1), 1.0 / (2 * m))
        if m < 2:
            mu = np.log(m1)
            Yt = np.zeros_like(X)
        else:
            C = np.atleast_2d(np.cov(X))
            ratio = C / np.outer(m1, m1)
            np.fill_diagonal(ratio, np.diag(C) / m1**2 - 1.0 / m1)
            Sig = np.log1p(np.maximum(ratio, -0.999))
            Sig = (Sig + Sig.T) / 2.0
            mu = np.log(m1) - 0.5 * np.maximum(np.diag(Sig), 0.0)
            # Start Y at the row-centered log counts, linearly transformed so
            # its sample covariance equals the moment estimate above
            # (restricted to the constraint subspace 1-perp).
            Yt = np.log(X + 1.0)
            Yt = Yt - Yt.mean(axis=1, keepdims=True)
            Yt = Yt - Yt.mean(axis=0, keepdims=True)
            Sig = Sig - Sig.mean(axis=0, keepdims=True)
            Sig = Sig - Sig.mean(axis=1, keepdims=True)
            Yt = _covariance_match(Yt, Sig)
    elif fam.kind == "bernoulli":
        Yt = _logit((X + 0.5) / 2.0)
        mu = Yt.mean(axis=1)
        Yt = Yt - mu[:, None]
    elif fam.kind == "binomial":
        Yt = _logit((X + 0.5) / (fam.n + 1.0))
        mu = Yt.mean(axis=1)
        Yt = Yt - mu[:, None]
    elif fam.kind == "negbinomial":
        eta0 = np.log((X + 0.5) / (X + 0.5 + fam.r))
        mu = eta0.mean(axis=1)
        Yt = eta0 - mu[:, None]
    else:  # gaussian
        mu = X.mean(axis=1)
        Yt = X - mu[:, None]
    Y = Yt - Yt.mean(axis=0, keepdims=True)
    if fam.kind == "negbinomial":
        # Keep eta = Y + mu strictly negative after centering.
        excess = Y + mu[:, None]
        worst = excess.max()
        if worst >= 0:
            pos = Y > 0
            scale = 0.9 * np.min(np.where(pos, -mu[:, None] / np.where(pos, Y, 1.0), np.inf))
            Y = Y * min(1.0, max(scale, 0.0))
    cap = NATURAL_PARAM_CAP - 1e-6
    mu = np.clip(mu, -cap, cap)
    eta = Y + mu[:, None]
    if np.abs(eta).max() > cap:
        Y = Y * (cap - np.abs(mu).max()) / max(np.abs(Y).max(), 1e-12)
    return GlenState(L=None, Y=Y, mu=mu)


def save_state(state: GlenState, cfg: GlenConfig, out_dir) -> None:
    """Serialize a fitted state as CSV matrices plus a JSON manifest."""
    import json
    from dataclasses import asdict
    from pathlib import Path

    from .graphs import save_matrix_csv

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix_csv(out / "L.csv", state.L)
    save_matrix_csv(out / "Y.csv", state.Y)
    save_matrix_csv(out / "mu.csv", np.asarray(state.mu)[None, :])
    save_matrix_csv(out / "trace.csv", np.asarray(state.objective_trace)[None, :])
    manifest = {
        "config": asdict(cfg),
        "iterations": state.iterations,
        "converged": bool(state.converged),
        "objective": state.objective_trace[-1] if state.objective_trace else None,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))


def run_glen(X: np.ndarray, cfg: GlenConfig) -> GlenState:
    """Alternate L-step, Y-step, mu-step until the objective stabilizes."""
    X = np.asarray(X, dtype=float)
    state = initialize_state(X, cfg)
    prev = np.inf
    for it in range(1, cfg.outer_max_iter + 1):
        state = l_step(state, cfg)
        state = y_step(state, X, cfg)
        state = mu_step(state, X, cfg)
        obj = glen_objective(state, X, cfg)
        state.objective_trace.append(obj)
        state.iterations = it
        if np.isfinite(prev) and abs(prev - obj) <= cfg.outer_rel_tol * (1.0 + abs(obj)):
            state.converged = True
            break
        prev = obj
    validate_laplacian(state.L, "fitted Laplacian")
    return state
