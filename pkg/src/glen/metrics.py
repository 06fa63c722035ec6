"""Structure- and weight-prediction metrics for learned Laplacians.

Every metric first rescales the estimate to trace N, so all results are
invariant to positive rescaling; edges are the strict upper triangle of
the (negated) off-diagonal, binarized at a fixed threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .graphs import normalize_trace

EDGE_THRESHOLD = 1e-4


@dataclass(frozen=True)
class EvalReport:
    """Edge-structure and weight-recovery scores for one fitted Laplacian."""

    precision: float
    recall: float
    f_score: float
    nmi: float
    re_l: float
    re_edge_l1: float
    re_edge_l2: float
    re_deg_l1: float
    re_deg_l2: float

    def to_dict(self) -> dict:
        return asdict(self)


def binarize_edges(L_hat: np.ndarray, threshold: float = EDGE_THRESHOLD) -> np.ndarray:
    """Boolean edge vector over the strict upper triangle of -L after
    trace normalization; strictly-greater comparison."""
    Ln = normalize_trace(np.asarray(L_hat, dtype=float))
    iu = np.triu_indices(Ln.shape[0], k=1)
    return -Ln[iu] > threshold


def structure_metrics(pred: np.ndarray, truth: np.ndarray):
    """(precision, recall, f_score) with the empty-set conventions
    P=0 for no predictions, R=0 for no true edges, F=0 when P+R=0."""
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    tp = float(np.count_nonzero(pred & truth))
    np_pred = np.count_nonzero(pred)
    np_true = np.count_nonzero(truth)
    precision = tp / np_pred if np_pred else 0.0
    recall = tp / np_true if np_true else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f


def _entropy(p: float) -> float:
    return -sum(q * np.log(q) for q in (p, 1.0 - p) if q > 0)


def nmi_binary(pred: np.ndarray, truth: np.ndarray) -> float:
    """Mutual information of the 2x2 edge contingency table, normalized by
    sqrt(H(pred) H(truth)).

    A constant vector has zero entropy; by convention the score is then 1
    when the vectors are identical and 0 otherwise.
    """
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("edge vectors must be nonempty")
    px = float(pred.mean())
    py = float(truth.mean())
    hx, hy = _entropy(px), _entropy(py)
    if hx == 0 or hy == 0:
        return 1.0 if np.array_equal(pred, truth) else 0.0
    mi = 0.0
    for joint, mx, my in (
        (float((pred & truth).mean()), px, py),
        (float((pred & ~truth).mean()), px, 1 - py),
        (float((~pred & truth).mean()), 1 - px, py),
        (float((~pred & ~truth).mean()), 1 - px, 1 - py),
    ):
        if joint > 0:
            mi += joint * np.log(joint / (mx * my))
    return float(mi / np.sqrt(hx * hy))


def relative_errors(L_hat: np.ndarray, L0: np.ndarray):
    """(re_l, re_edge_l1, re_edge_l2, re_deg_l1, re_deg_l2).

    L0 is the ground truth, already at trace N; L_hat is normalized
    before comparison.  Edge errors use the strict-upper-triangle weight
    vector w = -offdiag(L), degree errors the diagonal.
    """
    L0 = np.asarray(L0, dtype=float)
    if np.linalg.norm(L0) == 0:
        raise ValueError("ground truth Laplacian has zero norm")
    Ln = normalize_trace(np.asarray(L_hat, dtype=float))
    iu = np.triu_indices(L0.shape[0], k=1)
    w_hat, w0 = -Ln[iu], -L0[iu]
    d_hat, d0 = np.diag(Ln), np.diag(L0)

    def rel(x, y, ord):
        return float(np.linalg.norm(x - y, ord) / np.linalg.norm(y, ord))

    re_l = float(np.linalg.norm(Ln - L0, "fro") / np.linalg.norm(L0, "fro"))
    return (re_l, rel(w_hat, w0, 1), rel(w_hat, w0, 2),
            rel(d_hat, d0, 1), rel(d_hat, d0, 2))


def evaluate(L_hat: np.ndarray, L0: np.ndarray,
             threshold: float = EDGE_THRESHOLD) -> EvalReport:
    """Full report of one estimate against the ground truth Laplacian."""
    pred = binarize_edges(L_hat, threshold)
    truth = binarize_edges(L0, threshold)
    p, r, f = structure_metrics(pred, truth)
    re = relative_errors(L_hat, L0)
    return EvalReport(p, r, f, nmi_binary(pred, truth), *re)
