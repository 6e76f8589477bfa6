"""Monte Carlo estimation of moments, CLT diagnostics, and tail probabilities.

Sampling is embarrassingly parallel and bit-reproducible: sample k of a run
with seed s depends only on (s, k), and aggregation is in sample order, so
results are identical for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import kstest, norm

from . import rng, _mckernel
from .errors import DomainError, OverflowGuardError
from .laws import WeightLaw
from .schedules import Subcritical, QuasiCritical, derive_constants

__all__ = [
    "MomentEstimate", "TailEstimate", "sample_logW", "estimate_moment",
    "clt_diagnostic", "estimate_tail", "set_threads",
]

_LAW_IDS = {"gaussian": _mckernel.LAW_GAUSSIAN,
            "rademacher": _mckernel.LAW_RADEMACHER,
            "uniform": _mckernel.LAW_UNIFORM,
            "discrete": _mckernel.LAW_DISCRETE}

_LOG_CAP = 700.0


def set_threads(n: int | None) -> None:
    if n:
        import numba
        numba.set_num_threads(max(1, int(n)))


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    std_error: float
    n_samples: int
    median_logW: float
    trimmed_mean: float
    seed: int
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TailEstimate:
    x: float
    threshold: float
    p_hat: float
    ci_low: float
    ci_high: float
    rate: float | None
    rate_is_lower_bound: bool
    n_exceed: int
    n_samples: int
    in_window: bool


def _roots(seed: int, n_samples: int) -> np.ndarray:
    ks = np.arange(n_samples, dtype=np.int64)
    base = rng.mix64(np.uint64(np.int64(seed)))
    with np.errstate(over="ignore"):
        keys = base ^ (ks.astype(np.uint64) * rng.GOLDEN + np.uint64(1))
    return rng.mix64(keys)


def sample_logW(N: int, schedule, law: WeightLaw, n_samples: int, seed: int,
                rfac: float = 4.0, threads: int | None = None,
                double: bool = False) -> np.ndarray:
    """log W_{1,N} for n_samples independent environments.

    Mass is carried in float32 by default (log W accuracy ~1e-5); pass
    double=True for the float64 validation path.
    """
    if n_samples < 1:
        raise DomainError("n_samples >= 1 required")
    set_threads(threads)
    dc = derive_constants(schedule, law)
    beta = dc.beta_N
    Lam = law.Lambda(beta)
    if law.kind == "discrete":
        atoms = np.asarray(law.values, dtype=np.float64)
        cumps = np.cumsum(np.asarray(law.probs, dtype=np.float64))
    else:
        atoms = np.zeros(1)
        cumps = np.ones(1)
    w2 = 0.25 * np.array([math.exp(-beta - Lam), math.exp(beta - Lam)])
    K = _mckernel.grid_size(N, rfac)
    roots = _roots(seed, n_samples)
    return _mckernel.logW_batch(roots, N, float(rfac), _LAW_IDS[law.kind],
                                float(beta), float(Lam), w2, atoms, cumps,
                                K, double=double)


def estimate_moment(q: int, N: int, schedule, law: WeightLaw,
                    n_samples: int, seed: int, rfac: float = 4.0,
                    threads: int | None = None) -> MomentEstimate:
    """Plain Monte Carlo estimate of E[W_N^q]."""
    if q < 1:
        raise DomainError("q >= 1 required")
    params = {"q": q, "N": N, "schedule": repr(schedule), "law": law.kind}
    dc = derive_constants(schedule, law)
    if dc.beta_N == 0.0:
        return MomentEstimate(mean=1.0, std_error=0.0, n_samples=n_samples,
                              median_logW=0.0, trimmed_mean=1.0, seed=seed,
                              params=params)
    logw = sample_logW(N, schedule, law, n_samples, seed, rfac, threads)
    top = q * float(np.max(logw))
    if top > _LOG_CAP:
        raise OverflowGuardError(
            f"q * max log W = {top:.1f} exceeds the log-space cap "
            f"{_LOG_CAP}; W^q would saturate (heavy-tail guard)")
    wq = np.exp(q * logw)
    mean = float(wq.mean())
    sd = float(wq.std(ddof=1)) if n_samples > 1 else 0.0
    lo, hi = np.quantile(wq, [0.05, 0.95])
    inner = wq[(wq >= lo) & (wq <= hi)]
    return MomentEstimate(mean=mean, std_error=sd / math.sqrt(n_samples),
                          n_samples=n_samples,
                          median_logW=float(np.median(logw)),
                          trimmed_mean=float(inner.mean()),
                          seed=seed, params=params)


def clt_diagnostic(N: int, schedule: Subcritical, law: WeightLaw,
                   n_samples: int, seed: int, rfac: float = 4.0,
                   threads: int | None = None):
    """KS distance between log W_N and Normal(-lambda^2/2, lambda^2)."""
    if not isinstance(schedule, Subcritical):
        raise DomainError("CLT diagnostic requires a subcritical schedule")
    lam2 = math.log(1.0 / (1.0 - schedule.beta_hat**2))
    logw = sample_logW(N, schedule, law, n_samples, seed, rfac, threads)
    ks = kstest(logw, norm(loc=-lam2 / 2.0, scale=math.sqrt(lam2)).cdf)
    return float(ks.statistic), lam2


def _wilson(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    ph = k / n
    denom = 1.0 + z * z / n
    center = (ph + z * z / (2 * n)) / denom
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def estimate_tail(N: int, schedule, law: WeightLaw, x_grid, n_samples: int,
                  seed: int, rfac: float = 4.0,
                  threads: int | None = None) -> list[TailEstimate]:
    """Exceedance probabilities P(log W_N >= lambda x) over an x grid."""
    dc = derive_constants(schedule, law)
    lam2 = dc.lambda2
    lam = math.sqrt(lam2)
    if isinstance(schedule, Subcritical):
        bh2 = schedule.beta_hat ** 2
        window = 2.0 * lam2 * (1.0 - bh2) / bh2 * math.log(N)
    elif isinstance(schedule, QuasiCritical):
        window = 2.0 * lam2 * schedule.theta_N
    else:
        window = math.inf
    logw = sample_logW(N, schedule, law, n_samples, seed, rfac, threads)
    out = []
    for x in x_grid:
        thr = lam * x
        k = int((logw >= thr).sum())
        ph = k / n_samples
        lo, hi = _wilson(k, n_samples)
        rate = None
        lower = False
        if x > 0:
            if 0.0 < ph < 1.0:
                rate = -math.log(ph) / (x * x)
            elif ph == 0.0 and hi > 0.0:
                rate = -math.log(hi) / (x * x)
                lower = True
        out.append(TailEstimate(x=float(x), threshold=thr, p_hat=ph,
                                ci_low=lo, ci_high=hi, rate=rate,
                                rate_is_lower_bound=lower, n_exceed=k,
                                n_samples=n_samples,
                                in_window=(x * x) < window))
    return out
