"""Weight laws: centered unit-variance distributions with exact log-MGF.

A law mu must have finite exponential moments; it enters the model through
Lambda(beta) = log E[exp(beta * omega)] and the overlap combinations

    Lambda_p(beta) = Lambda(p * beta) - p * Lambda(beta),   p >= 2.

For the standard Gaussian, Lambda_p(beta) = beta^2 * C(p, 2) exactly; the
other laws agree to leading order as beta -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import CapacityError, RangeError
from . import rng

__all__ = [
    "WeightLaw", "gaussian", "rademacher", "uniform_scaled", "discrete_table",
    "modified_weight", "sum_modified_weights", "lambda_ratio_constant",
]


@dataclass(frozen=True)
class WeightLaw:
    """A centered, unit-variance weight distribution.

    kind: one of 'gaussian', 'rademacher', 'uniform', 'discrete'.
    For 'discrete', ``values``/``probs`` hold the (re-normalized) atoms.
    """

    kind: str
    values: tuple = field(default=())
    probs: tuple = field(default=())

    # -- log moment generating function ------------------------------------

    def Lambda(self, beta: float) -> float:
        b = float(beta)
        if self.kind == "gaussian":
            return 0.5 * b * b
        if self.kind == "rademacher":
            # log cosh, overflow-safe for large |b|
            a = abs(b)
            return a + math.log1p(math.exp(-2.0 * a)) - math.log(2.0)
        if self.kind == "uniform":
            x = math.sqrt(3.0) * b
            if abs(x) < 1e-5:
                # sinh(x)/x = 1 + x^2/6 + x^4/120 + ...
                return math.log1p(x * x / 6.0 * (1.0 + x * x / 20.0))
            return math.log(math.sinh(abs(x)) / abs(x))
        if self.kind == "discrete":
            v = np.asarray(self.values)
            p = np.asarray(self.probs)
            m = np.max(b * v)
            return float(m + np.log(np.sum(p * np.exp(b * v - m))))
        raise RangeError(f"unknown law kind {self.kind!r}")

    def Lambda_p(self, p: int, beta: float) -> float:
        """Lambda(p*beta) - p*Lambda(beta); Lambda_1 == 0."""
        if p < 1:
            raise RangeError("p must be >= 1")
        if p == 1:
            return 0.0
        return self.Lambda(p * beta) - p * self.Lambda(beta)

    def Lambda2(self, beta: float) -> float:
        return self.Lambda_p(2, beta)

    def sigma2(self, beta: float) -> float:
        """Pair interaction energy e^{Lambda_2(beta)} - 1."""
        return math.expm1(self.Lambda2(beta))

    # -- sampling -----------------------------------------------------------

    def sample_sites(self, root, n, u, v):
        """Deterministic draws at rotated-coordinate sites (n, u, v)."""
        if self.kind == "rademacher":
            parity = n & 1
            bits = rng.bit_for_u(root, n, np.asarray(u), v, parity)
            return 2.0 * bits - 1.0
        w0 = rng.site_word(root, n, u, v, stream=0)
        if self.kind == "gaussian":
            w1 = rng.site_word(root, n, u, v, stream=1)
            return rng.word_to_gaussian(w0, w1)
        x = rng.word_to_unit(w0)
        if self.kind == "uniform":
            return (2.0 * x - 1.0) * math.sqrt(3.0)
        if self.kind == "discrete":
            cum = np.cumsum(self.probs)
            idx = np.searchsorted(cum, x, side="right")
            idx = np.minimum(idx, len(self.values) - 1)
            return np.asarray(self.values)[idx]
        raise RangeError(f"unknown law kind {self.kind!r}")

    @property
    def max_abs(self) -> float:
        """sup |omega| (inf for gaussian); used by the heavy-tail guard."""
        if self.kind == "gaussian":
            return math.inf
        if self.kind == "rademacher":
            return 1.0
        if self.kind == "uniform":
            return math.sqrt(3.0)
        return float(np.max(np.abs(self.values)))


def gaussian() -> WeightLaw:
    return WeightLaw("gaussian")


def rademacher() -> WeightLaw:
    return WeightLaw("rademacher")


def uniform_scaled() -> WeightLaw:
    return WeightLaw("uniform")


def discrete_table(values, probs) -> WeightLaw:
    """Discrete law from a raw table, re-centered and re-scaled to (0, 1).

    The construction checks mean/variance to 1e-12 by exact summation.
    """
    v = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    if v.shape != p.shape or v.ndim != 1 or len(v) < 2:
        raise RangeError("values/probs must be 1-d arrays of equal length >= 2")
    if np.any(p <= 0):
        raise RangeError("probabilities must be positive")
    p = p / p.sum()
    m = float(np.dot(p, v))
    var = float(np.dot(p, (v - m) ** 2))
    if var <= 0:
        raise RangeError("degenerate table: zero variance")
    v = (v - m) / math.sqrt(var)
    law = WeightLaw("discrete", values=tuple(v.tolist()), probs=tuple(p.tolist()))
    assert abs(np.dot(p, v)) < 1e-12 and abs(np.dot(p, v**2) - 1.0) < 1e-12
    return law


# -- modified weights for clustered pair-sets -------------------------------

def modified_weight(sigma: float, K) -> float:
    """Weight sigma^{2|K| - 1} if two pairs of K share a vertex, else sigma^{2|K|}.

    K is a collection of pairs (i, j); the discount applies as soon as any
    two pairs intersect (one shared particle collapses one sigma power).
    """
    K = list(K)
    if not K:
        raise RangeError("K must be non-empty")
    shares = False
    for a in range(len(K)):
        for b in range(a + 1, len(K)):
            if set(K[a]) & set(K[b]):
                shares = True
                break
        if shares:
            break
    return sigma ** (2 * len(K) - (1 if shares else 0))


def _matchings(q: int, k: int) -> int:
    """Number of k-subsets of C_q that are pairwise vertex-disjoint."""
    if 2 * k > q:
        return 0
    return (math.factorial(q)
            // (math.factorial(k) * (2 ** k) * math.factorial(q - 2 * k)))


def sum_modified_weights(q: int, sigma: float, enumerate_cutoff: int = 6) -> float:
    """Sum of modified weights over all pair-subsets K of C_q with |K| > 1.

    Exact enumeration up to ``enumerate_cutoff`` particles; beyond that the
    subsets are grouped by size into vertex-disjoint (weight sigma^{2k}) and
    vertex-sharing (weight sigma^{2k-1}) counts, which is still exact.
    """
    if q < 3:
        raise RangeError("q must be >= 3")
    pairs = list(combinations(range(1, q + 1), 2))
    if q <= enumerate_cutoff:
        total = 0.0
        for k in range(2, len(pairs) + 1):
            for K in combinations(pairs, k):
                total += modified_weight(sigma, K)
        return total
    if q > 40:
        raise CapacityError("grouped count limited to q <= 40")
    total = 0.0
    npairs = len(pairs)
    for k in range(2, npairs + 1):
        disjoint = _matchings(q, k)
        sharing = math.comb(npairs, k) - disjoint
        total += disjoint * sigma ** (2 * k) + sharing * sigma ** (2 * k - 1)
    return total


def lambda_ratio_constant(law: WeightLaw, p_grid=range(2, 9),
                          beta_grid=None) -> float:
    """Empirical C with Lambda_p(beta) <= (1 + C p beta) beta^2 C(p,2).

    Returns the max over the grid of (ratio - 1)/(p beta); may be negative
    when the law's overlap energies sit below the Gaussian ones.
    """
    if beta_grid is None:
        beta_grid = np.linspace(0.01, 0.2, 20)
    worst = -math.inf
    for p in p_grid:
        for b in beta_grid:
            if p * b > 1.0:
                continue
            gauss = b * b * math.comb(p, 2)
            c = (law.Lambda_p(p, b) / gauss - 1.0) / (p * b)
            worst = max(worst, c)
    return worst
