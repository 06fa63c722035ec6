"""Exponential-family kernels in natural parameterization.

Each family provides the log-partition A and its first two derivatives,
the sufficient statistic T(x) = x, the log base measure, a sampler, and
the intercept-only offset GLM solve used by the mean-offset update.
All A/A'/A'' functions are vectorized over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, gammaln

# Global natural-parameter cap: |eta| <= 30 keeps every family finite in
# double precision; saturated GLM fits return the cap.
NATURAL_PARAM_CAP = 30.0


class FamilyDomainError(ValueError):
    """Natural parameter outside the family's domain."""


class SupportError(ValueError):
    """Observation outside the family's support."""


def _log1pexp(eta):
    """Overflow-safe log(1 + e^eta)."""
    eta = np.asarray(eta, dtype=float)
    return np.maximum(eta, 0.0) + np.log1p(np.exp(-np.abs(eta)))


@dataclass(frozen=True)
class ExponentialFamily:
    """One-parameter exponential family with mean-targeting link.

    kind is one of "gaussian", "bernoulli", "binomial", "poisson",
    "negbinomial"; n (binomial trials) and r (negative-binomial shape)
    are fixed constants, never estimated.
    """

    kind: str
    n: int = 1
    r: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "bernoulli", "binomial", "poisson", "negbinomial"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "binomial" and self.n < 1:
            raise ValueError("binomial n must be a positive integer")
        if self.kind == "negbinomial" and self.r <= 0:
            raise ValueError("negative-binomial r must be positive")

    @property
    def tag(self) -> str:
        if self.kind == "binomial":
            return f"binomial:{self.n}"
        if self.kind == "negbinomial":
            return f"negbinomial:{self.r:g}"
        return self.kind

    @property
    def is_discrete(self) -> bool:
        return self.kind != "gaussian"

    def check_domain(self, eta) -> None:
        eta = np.asarray(eta, dtype=float)
        if not np.all(np.isfinite(eta)):
            raise FamilyDomainError("natural parameter must be finite")
        if self.kind == "negbinomial" and np.any(eta >= 0):
            raise FamilyDomainError("negative-binomial natural parameter must be < 0")

    def check_support(self, x) -> None:
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise SupportError("observations must be finite")
        if self.kind == "gaussian":
            return
        if np.any(x < 0) or np.any(x != np.round(x)):
            raise SupportError(f"{self.kind} observations must be nonnegative integers")
        if self.kind == "bernoulli" and np.any(x > 1):
            raise SupportError("bernoulli observations must lie in {0, 1}")
        if self.kind == "binomial" and np.any(x > self.n):
            raise SupportError(f"binomial observations must lie in 0..{self.n}")

    # -- log-partition and derivatives -------------------------------------

    def log_partition(self, eta):
        self.check_domain(eta)
        eta = np.asarray(eta, dtype=float)
        if self.kind == "poisson":
            out = np.exp(eta)
        elif self.kind == "bernoulli":
            out = _log1pexp(eta)
        elif self.kind == "binomial":
            out = self.n * _log1pexp(eta)
        elif self.kind == "negbinomial":
            out = -self.r * np.log1p(-np.exp(eta))
        else:  # gaussian, unit variance
            out = 0.5 * eta**2
        return out if out.ndim else float(out)

    def mean(self, eta):
        """A'(eta), the inverse link g^{-1}."""
        self.check_domain(eta)
        eta = np.asarray(eta, dtype=float)
        if self.kind == "poisson":
            out = np.exp(eta)
        elif self.kind == "bernoulli":
            out = expit(eta)
        elif self.kind == "binomial":
            out = self.n * expit(eta)
        elif self.kind == "negbinomial":
            e = np.exp(eta)
            out = self.r * e / (1.0 - e)
        else:
            out = eta.copy()
        return out if out.ndim else float(out)

    def variance(self, eta):
        """A''(eta) > 0 on the natural domain."""
        self.check_domain(eta)
        eta = np.asarray(eta, dtype=float)
        if self.kind == "poisson":
            out = np.exp(eta)
        elif self.kind == "bernoulli":
            s = expit(eta)
            out = s * (1.0 - s)
        elif self.kind == "binomial":
            s = expit(eta)
            out = self.n * s * (1.0 - s)
        elif self.kind == "negbinomial":
            e = np.exp(eta)
            out = self.r * e / (1.0 - e) ** 2
        else:
            out = np.ones_like(eta)
        return out if out.ndim else float(out)

    def mean_and_variance(self, eta):
        return self.mean(eta), self.variance(eta)

    def log_base_measure(self, x):
        """log k(x); constant in the natural parameter."""
        self.check_support(x)
        x = np.asarray(x, dtype=float)
        if self.kind == "poisson":
            out = -gammaln(x + 1.0)
        elif self.kind == "bernoulli":
            out = np.zeros_like(x)
        elif self.kind == "binomial":
            out = gammaln(self.n + 1.0) - gammaln(x + 1.0) - gammaln(self.n - x + 1.0)
        elif self.kind == "negbinomial":
            out = gammaln(x + self.r) - gammaln(self.r) - gammaln(x + 1.0)
        else:
            out = -0.5 * x**2 - 0.5 * math.log(2.0 * math.pi)
        return out if out.ndim else float(out)

    def sample(self, eta, rng: np.random.Generator):
        """Draw from the family at natural parameter eta (broadcasts)."""
        self.check_domain(eta)
        eta = np.asarray(eta, dtype=float)
        if self.kind == "poisson":
            out = rng.poisson(np.exp(eta))
        elif self.kind == "bernoulli":
            out = rng.binomial(1, expit(eta))
        elif self.kind == "binomial":
            out = rng.binomial(self.n, expit(eta))
        elif self.kind == "negbinomial":
            # numpy's p is the success probability; mean n(1-p)/p matches
            # r e^eta / (1 - e^eta) with p = 1 - e^eta.
            out = rng.negative_binomial(self.r, 1.0 - np.exp(eta))
        else:
            out = rng.normal(eta, 1.0)
        if np.ndim(eta) == 0:
            return out.item() if hasattr(out, "item") else out
        return out

    def nll(self, x, eta, include_base_measure: bool = False):
        """-log p(x | eta) up to the base measure: -eta*x + A(eta)."""
        self.check_support(x)
        x = np.asarray(x, dtype=float)
        out = -np.asarray(eta, dtype=float) * x + self.log_partition(eta)
        if include_base_measure:
            out = out - self.log_base_measure(x)
        return out if np.ndim(out) else float(out)


def family_from_tag(tag: str) -> ExponentialFamily:
    """Parse "gaussian" | "bernoulli" | "binomial:n" | "poisson" | "negbinomial:r"."""
    name, _, arg = tag.strip().lower().partition(":")
    if name == "binomial":
        if not arg:
            raise ValueError("binomial tag requires a trial count, e.g. 'binomial:5'")
        return ExponentialFamily("binomial", n=int(arg))
    if name == "negbinomial":
        if not arg:
            raise ValueError("negbinomial tag requires a shape, e.g. 'negbinomial:2'")
        return ExponentialFamily("negbinomial", r=float(arg))
    if arg:
        raise ValueError(f"family {name!r} takes no parameter")
    return ExponentialFamily(name)


def fit_scalar_offset_glm(
    fam: ExponentialFamily,
    x_row: np.ndarray,
    y_row: np.ndarray,
    mu_init: float = 0.0,
    full: bool = False,
):
    """Intercept-only GLM with fixed offsets: minimize sum_j -(mu+y_j)x_j + A(mu+y_j).

    The score sum_j (A'(mu+y_j) - x_j) is monotone in mu, so the minimizer
    is found by bracketed root finding on [-cap, cap]; if the score does
    not change sign on the bracket the fit is saturated and the cap is
    returned. With full=True also returns the saturated flag.
    """
    fam.check_support(x_row)
    x = np.asarray(x_row, dtype=float)
    y = np.asarray(y_row, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x_row and y_row must have equal length")
    cap = NATURAL_PARAM_CAP

    if fam.kind == "poisson":
        sx = x.sum()
        denom = np.exp(y).sum()
        if sx <= 0:
            mu, saturated = -cap, True
        else:
            mu = float(np.log(sx / denom))
            saturated = abs(mu) >= cap
            mu = float(np.clip(mu, -cap, cap))
        return (mu, saturated) if full else mu

    if fam.kind == "negbinomial":
        # eta = mu + y must stay < 0; shrink the upper bracket accordingly.
        hi = min(cap, float(-y.max()) - 1e-9)
        lo = -cap
        if hi <= lo:
            raise FamilyDomainError("offsets leave no feasible negbinomial intercept")
    else:
        lo, hi = -cap, cap

    def score(mu):
        return float(np.sum(fam.mean(mu + y) - x))

    s_lo, s_hi = score(lo), score(hi)
    if s_lo >= 0:
        return ((lo, True) if full else lo)
    if s_hi <= 0:
        return ((hi, True) if full else hi)
    mu = float(brentq(score, lo, hi, xtol=1e-12, rtol=1e-14))
    return (mu, False) if full else mu
