"""Coupling schedules, derived constants, and the closed-form scalar family.

The temperature enters through sigma2 = e^{Lambda_2(beta_N)} - 1 and its
normalized version sigma2_bar = sigma2 / pi.  Everything downstream
(b_t, F, f, g, lambda^2 increments) is a function of sigma2_bar alone:

    b_t        = 1 / (1 - sigma2_bar log t)
    F(u)       = b_u / u                       (extended variant: 1 on u < 1)
    f_t(v)     = (log((1 - s log v)/(1 - s log t))) / s,   f' = -F
    g(x)       = (log(1/(1 - s log x))) / s,               g' = F, 0 on [0,1]
    lambda^2_{s,t} = log((1 - s log s')/(1 - s log t))     (additive in time)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InvalidRegimeError, NoRootError
from .laws import WeightLaw
from . import walks

__all__ = [
    "Subcritical", "QuasiCritical", "Explicit", "DerivedConstants",
    "derive_constants", "lambda2_stN", "b_func", "F_func", "f_func", "g_func",
    "F_prime_exact", "theta_power_log", "theta_loglog",
]


# ---------------------------------------------------------------------------
# schedules

@dataclass(frozen=True)
class Subcritical:
    """beta_N^2 = beta_hat^2 / R_N with 0 < beta_hat < 1."""
    beta_hat: float
    N: int

    def __post_init__(self):
        if not (0.0 < self.beta_hat < 1.0):
            raise InvalidRegimeError("subcritical needs 0 < beta_hat < 1")
        if self.N < 1:
            raise InvalidRegimeError("N >= 1 required")


@dataclass(frozen=True)
class QuasiCritical:
    """sigma_N^2 = (1 - theta_N / log N) / R_N with 1 < theta_N < log N."""
    theta_N: float
    N: int

    def __post_init__(self):
        if self.N < 3:
            raise InvalidRegimeError("N >= 3 required for a quasi-critical schedule")
        if not (1.0 < self.theta_N < math.log(self.N)):
            raise InvalidRegimeError(
                f"theta_N={self.theta_N} outside (1, log N={math.log(self.N):.4f})")


@dataclass(frozen=True)
class Explicit:
    """Directly specified inverse temperature beta >= 0."""
    beta: float
    N: int

    def __post_init__(self):
        if self.beta < 0:
            raise InvalidRegimeError("beta >= 0 required")
        if self.N < 1:
            raise InvalidRegimeError("N >= 1 required")


def theta_power_log(a: float):
    """Preset theta_N = (log N)^a for a in (0, 1)."""
    if not (0.0 < a < 1.0):
        raise InvalidRegimeError("exponent a must lie in (0, 1)")
    return lambda N: math.log(N) ** a


def theta_loglog(c: float = 2.0):
    """Preset theta_N = c log log N."""
    return lambda N: c * math.log(math.log(N))


@dataclass(frozen=True)
class DerivedConstants:
    beta_N: float
    sigma2: float
    sigma2_bar: float
    R_N: float
    lambda2: float
    N: int


def _solve_beta(law: WeightLaw, target_sigma2: float,
                tol: float = 1e-13, beta_cap: float = 64.0) -> float:
    """Bisection for e^{Lambda_2(beta)} - 1 = target (Lambda_2 increasing).

    Bisection is deliberate: it is unconditionally safe for a monotone
    function and the 1e-13 tolerance on sigma2 costs ~50 iterations.
    """
    if target_sigma2 < 0:
        raise DomainError("target sigma2 must be >= 0")
    if target_sigma2 == 0.0:
        return 0.0
    hi = 1e-3
    while law.sigma2(hi) < target_sigma2:
        hi *= 2.0
        if hi > beta_cap:
            raise NoRootError(
                f"sigma2={target_sigma2} not attainable below beta={beta_cap} "
                f"for law {law.kind!r}")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if law.sigma2(mid) < target_sigma2:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16 or abs(law.sigma2(mid) - target_sigma2) <= tol:
            break
    beta = 0.5 * (lo + hi)
    if abs(law.sigma2(beta) - target_sigma2) > max(tol, 1e-12):
        raise NoRootError("bisection failed to meet tolerance")
    return beta


def derive_constants(schedule, law: WeightLaw) -> DerivedConstants:
    """All derived temperature constants for a schedule under a weight law."""
    N = schedule.N
    R_N = walks.collision_time_R(N)
    if isinstance(schedule, Subcritical):
        beta_N = schedule.beta_hat / math.sqrt(R_N)
        sigma2 = law.sigma2(beta_N)
        lam2 = math.log(1.0 / (1.0 - schedule.beta_hat**2))
    elif isinstance(schedule, QuasiCritical):
        target = (1.0 - schedule.theta_N / math.log(N)) / R_N
        beta_N = _solve_beta(law, target)
        sigma2 = law.sigma2(beta_N)
        lam2 = math.log(math.log(N) / schedule.theta_N)
    elif isinstance(schedule, Explicit):
        beta_N = schedule.beta
        sigma2 = law.sigma2(beta_N)
        # variance proxy from the effective beta_hat^2 = sigma2 R_N, when < 1
        prod = sigma2 * R_N
        lam2 = math.log(1.0 / (1.0 - prod)) if prod < 1.0 else math.inf
    else:
        raise InvalidRegimeError(f"unknown schedule {schedule!r}")
    return DerivedConstants(beta_N=beta_N, sigma2=sigma2,
                            sigma2_bar=sigma2 / math.pi, R_N=R_N,
                            lambda2=lam2, N=N)


# ---------------------------------------------------------------------------
# scalar function family

def _check_log_domain(t: float, s: float) -> None:
    if t < 1:
        raise DomainError("time argument must be >= 1")
    if s * math.log(t) >= 1.0:
        raise DomainError(
            f"sigma2_bar log t = {s * math.log(t):.6f} >= 1: out of domain")


def b_func(t: float, sigma2_bar: float) -> float:
    """b_t = 1 / (1 - sigma2_bar log t); the second-moment proxy. b_1 = 1."""
    _check_log_domain(t, sigma2_bar)
    return 1.0 / (1.0 - sigma2_bar * math.log(t))


def F_func(u: float, sigma2_bar: float, extended: bool = False) -> float:
    """F(u) = b_u / u for u >= 1; the extended variant is 1 below u = 1."""
    if u < 1.0:
        if extended:
            return 1.0
        raise DomainError("F is defined on u >= 1 (use extended=True below 1)")
    return b_func(u, sigma2_bar) / u


def f_func(v: float, t: float, sigma2_bar: float) -> float:
    """f_t(v) = lambda^2_{v,t} / sigma2_bar; positive, non-increasing, f(t)=0."""
    if not (1.0 <= v <= t):
        raise DomainError("need 1 <= v <= t")
    return lambda2_stN(v, t, sigma2_bar) / sigma2_bar


def g_func(x: float, sigma2_bar: float) -> float:
    """g(x) = lambda^2_{1,x} / sigma2_bar for x >= 1, zero on [0, 1]."""
    if x < 0:
        raise DomainError("x >= 0 required")
    if x <= 1.0:
        return 0.0
    return lambda2_stN(1.0, x, sigma2_bar) / sigma2_bar


def lambda2_stN(s: float, t: float, sigma2_bar: float) -> float:
    """log((1 - sigma2_bar log s) / (1 - sigma2_bar log t)); additive in time."""
    if not (1.0 <= s <= t):
        raise DomainError("need 1 <= s <= t")
    _check_log_domain(t, sigma2_bar)
    num = 1.0 - sigma2_bar * math.log(s)
    den = 1.0 - sigma2_bar * math.log(t)
    return math.log(num / den)


def F_prime_exact(u: float, sigma2_bar: float) -> tuple[float, float]:
    """(F'(u), eps) with F'(u) = -(1 + eps) F(u)^2 (1 - sigma2_bar log u).

    The exact curvature correction is eps = -sigma2_bar / (1 - sigma2_bar
    log u); it vanishes as the coupling does.
    """
    _check_log_domain(u, sigma2_bar)
    D = 1.0 - sigma2_bar * math.log(u)
    eps = -sigma2_bar / D
    Fu = F_func(u, sigma2_bar)
    return -(1.0 + eps) * Fu * Fu * D, eps
