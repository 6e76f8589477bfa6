"""Concrete right-hand sides of the moment theorems, gates, and comparisons.

Free constants that the theory only proves to exist (C_alpha, c_star, the
law-dependent c) are knobs defaulting to 1; comparisons against bounds with
free constants run in report mode and never assert.  Assertion mode is
reserved for the constant-free facts: the second-moment renewal inequality,
the kernel bound 2/(pi n), and the collision-event union bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, GateError
from . import walks
from .schedules import b_func, lambda2_stN
from .moments import phi_exact

__all__ = [
    "BoundReport", "gate_subcritical", "gate_qc", "gate_Hqta", "theorem_rhs",
    "threshold_constants", "delta_condition_eps", "compare_moment_to_bound",
    "collision_excess_probability", "check_collision_event_bound",
    "check_apriori", "ld_rate_report", "second_moment_bound_report",
]


@dataclass(frozen=True)
class BoundReport:
    name: str
    lhs: float
    rhs: float
    gate_satisfied: bool = True
    mode: str = "report"          # "report" or "assert"
    scale: str = "linear"         # "linear" or "log"
    params: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-12) + 1e-300

    def row(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "holds": self.holds,
                "gate": self.gate_satisfied, "mode": self.mode,
                "scale": self.scale}


# ---------------------------------------------------------------------------
# gates

def gate_subcritical(q: int, N: int, alpha: float, beta_hat: float) -> tuple[bool, float]:
    """C(q,2) <= alpha (1 - bh^2)/bh^2 log N; returns (ok, margin)."""
    _check_alpha(alpha)
    cap = alpha * (1.0 - beta_hat**2) / beta_hat**2 * math.log(N)
    return math.comb(q, 2) <= cap, cap - math.comb(q, 2)


def gate_qc(q: int, sigma2_bar: float, N: int, alpha: float) -> tuple[bool, float]:
    """C(q,2) <= alpha (1 - s log N)/s with s = sigma2_bar."""
    _check_alpha(alpha)
    cap = alpha * (1.0 - sigma2_bar * math.log(N)) / sigma2_bar
    return math.comb(q, 2) <= cap, cap - math.comb(q, 2)


def gate_Hqta(q: int, t: float, sigma2_bar: float, alpha: float) -> tuple[bool, float]:
    """C(q,2) b_t sigma2_bar <= alpha < 1."""
    _check_alpha(alpha)
    val = math.comb(q, 2) * b_func(t, sigma2_bar) * sigma2_bar
    return val <= alpha, alpha - val


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")


# ---------------------------------------------------------------------------
# theorem right-hand sides (log scale)

def delta_condition_eps(q: int, t: float, sigma2_bar: float, C: float = 1.0) -> float:
    """Two-branch error term: C * min(q^2 b_t s, q^{-1/4}).

    Both branches are upper envelopes, so the min is a continuous evaluator
    that satisfies each branch inequality on its own region.
    """
    return C * min(q * q * b_func(t, sigma2_bar) * sigma2_bar,
                   q ** -0.25)


def theorem_rhs(kind: str, *, q: int, N: int | None = None,
                beta_hat: float | None = None, theta_N: float | None = None,
                sigma2_bar: float | None = None, s: float = 1.0,
                t: float | None = None, alpha: float = 0.5,
                C_alpha: float = 1.0, c_star: float = 1.0,
                eps_N: float | None = None, eps_finite: float = 0.1) -> float:
    """log of the structural moment bound for one of the four statements.

    kind = 'SC':       log C_alpha + lambda^2(bh) C(q,2)
    kind = 'QC':       log C_alpha + log(log N / theta_N) C(q,2)
    kind = 'main':     log(c_star b_t) + lambda^2_{s,t} (C(q,2)-1)(1+eps_N)
    kind = 'finite_q': log((1+e) C(q,2)/(C(q,2)-1)) + lam_N^2 C(q,2)
    """
    cq2 = math.comb(q, 2)
    if kind == "SC":
        ok, _ = gate_subcritical(q, N, alpha, beta_hat)
        if not ok:
            raise GateError("subcritical q-gate fails")
        lam2 = math.log(1.0 / (1.0 - beta_hat**2))
        return math.log(C_alpha) + lam2 * cq2
    if kind == "QC":
        lam2 = math.log(math.log(N) / theta_N)
        if cq2 > alpha * theta_N:
            raise GateError("quasi-critical q-gate fails")
        return math.log(C_alpha) + lam2 * cq2
    if kind == "main":
        ok, _ = gate_Hqta(q, t, sigma2_bar, alpha)
        if not ok:
            raise GateError("H_{q,t,alpha} gate fails")
        if eps_N is None:
            eps_N = delta_condition_eps(q, t, sigma2_bar)
        lam2 = lambda2_stN(s, t, sigma2_bar)
        return (math.log(c_star * b_func(t, sigma2_bar))
                + lam2 * (cq2 - 1) * (1.0 + eps_N))
    if kind == "finite_q":
        if cq2 < 2:
            raise DomainError("finite_q needs q >= 3")
        lam2 = math.log(math.log(N) / theta_N)
        pref = (1.0 + eps_finite) * cq2 / (cq2 - 1)
        err = (1.0 / eps_finite) / theta_N
        return math.log(pref) + lam2 * cq2 * (1.0 + err)
    raise DomainError(f"unknown bound kind {kind!r}")


def threshold_constants(L: int, L0: int, delta: float, q: int,
                        p0: int = 2, c0: float = 1.0, c: float = 1.0,
                        sigma2_bar: float | None = None, t: float | None = None,
                        eps_diamond: float = 0.0) -> dict:
    """All explicit combinatorial constants of the geometric-series step."""
    if delta <= 0 or L < 2:
        raise DomainError("need delta > 0 and L >= 2")
    cq2 = math.comb(q, 2)
    d2 = 1.0 + 2.0 / delta
    out = {
        "C_L_delta_q": cq2 + 2.0 * d2**2 * L * q,
        "C_delta_q": d2 * (cq2 - 1),
        "C_L_L0_delta_q": cq2 + 2.0 * d2**2 * (2.0 * p0 * L * q
                                               + c * q * q / L0 + c * L0 * q),
        "frak_C_L_delta_q": (2.0 / delta) ** (1.0 / L)
                            * (8.0 * q * L / delta**2 + cq2),
    }
    if sigma2_bar is not None and t is not None:
        bt = b_func(t, sigma2_bar)
        load = sigma2_bar * bt * (1.0 + delta) * (1.0 + eps_diamond)
        out["alpha0"] = out["C_L_delta_q"] * d2 ** (1.0 / L) * load
        out["alpha1"] = out["C_delta_q"] * load
        out["alpha2"] = out["C_L_L0_delta_q"] * d2 ** (1.0 / L) * load
    return out


# ---------------------------------------------------------------------------
# comparisons

def second_moment_bound_report(m: int, sigma2: float) -> BoundReport:
    """sum_{n<=m} U(n) (= E[W_m^2]) against the renewal bound 1/(1 - s2 R_m)."""
    kern = walks.build_collision_kernel(m, sigma2=sigma2)
    lhs = float(kern.U.sum())
    r = walks.collision_time_R(m)
    if sigma2 * r >= 1.0:
        raise DomainError("sigma2 R_m >= 1: bound side diverges")
    return BoundReport(name="second_moment_renewal", lhs=lhs,
                       rhs=1.0 / (1.0 - sigma2 * r), mode="assert",
                       params={"m": m, "sigma2": sigma2})


def compare_moment_to_bound(moment_value: float, bound_kind: str,
                            params: dict) -> BoundReport:
    """Report (or assert, for constant-free kinds) a moment against a bound."""
    if bound_kind == "second_moment":
        rep = second_moment_bound_report(params["m"], params["sigma2"])
        return BoundReport(name=rep.name, lhs=moment_value, rhs=rep.rhs,
                           mode="assert", params=params)
    log_rhs = theorem_rhs(bound_kind, **params)
    return BoundReport(name=f"moment_vs_{bound_kind}",
                       lhs=math.log(moment_value), rhs=log_rhs,
                       mode="report", scale="log", params=params)


# ---------------------------------------------------------------------------
# collision events

def collision_excess_probability(q: int, p: int, n: int, starts=None,
                                 n_samples: int = 0, seed: int = 7) -> tuple[float, float]:
    """P(m_n^q > p) exactly (q <= 3) or by Monte Carlo; returns (p_hat, se).

    For q <= 3 the single-time coincidence pattern follows from heat
    kernels: P(pair ij meets) = p_{2n}(x_i - x_j), P(triple) is a lattice
    sum of three kernels.
    """
    if starts is None:
        starts = [(0, 0)] * q
    if q == 2:
        if p >= 2:
            return 0.0, 0.0
        d = (starts[0][0] - starts[1][0], starts[0][1] - starts[1][1])
        return walks.kernel_closed_form(2 * n, d), 0.0
    if q == 3 and n <= 64:
        pr_pair = {}
        for (a, b) in ((0, 1), (0, 2), (1, 2)):
            d = (starts[a][0] - starts[b][0], starts[a][1] - starts[b][1])
            pr_pair[(a, b)] = walks.kernel_closed_form(2 * n, d)
        # triple meeting probability: sum_x prod_i p_n(x - x_i)
        grid = np.arange(-n, n + 1)
        logs = []
        for (sx, sy) in starts:
            lb1 = walks.log_b1d(n, grid[:, None] + grid[None, :] - sx - sy)
            lb2 = walks.log_b1d(n, grid[:, None] - grid[None, :] - sx + sy)
            logs.append(lb1 + lb2)
        tri = float(np.exp(logs[0] + logs[1] + logs[2]).sum())
        if p >= 3:
            return 0.0, 0.0
        if p == 2:
            return tri, 0.0
        # p <= 1: union of the three pair events
        return sum(pr_pair.values()) - 2.0 * tri, 0.0
    if n_samples <= 0:
        raise CapacityError("exact route limited to q <= 3, n <= 64; "
                            "pass n_samples for Monte Carlo")
    rng = np.random.default_rng(seed)
    hits = 0
    batch = 4096
    done = 0
    while done < n_samples:
        b = min(batch, n_samples - done)
        steps = rng.integers(0, 4, size=(b, q, n))
        dx = np.where(steps == 0, 1, np.where(steps == 1, -1, 0))
        dy = np.where(steps == 2, 1, np.where(steps == 3, -1, 0))
        x = dx.sum(axis=2) + np.array([s[0] for s in starts])
        y = dy.sum(axis=2) + np.array([s[1] for s in starts])
        pos = x * 1000003 + y
        m_q = np.zeros(b, dtype=int)
        for i in range(q):
            share = np.zeros(b, dtype=bool)
            for j in range(q):
                if i != j:
                    share |= pos[:, i] == pos[:, j]
            m_q += share
        hits += int((m_q > p).sum())
        done += b
    ph = hits / n_samples
    return ph, math.sqrt(max(ph * (1 - ph), 1e-12) / n_samples)


def check_collision_event_bound(q: int, p: int, n: int, n_samples: int = 0,
                                seed: int = 7) -> BoundReport:
    """P(m_n > p) <= q^p n^{-p/3}, with a 4-sigma allowance in MC mode."""
    ph, se = collision_excess_probability(q, p, n, n_samples=n_samples, seed=seed)
    rhs = q ** p * n ** (-p / 3.0)
    return BoundReport(name="collision_event_union_bound",
                       lhs=ph - 4.0 * se, rhs=rhs, mode="assert",
                       params={"q": q, "p": p, "n": n, "p_hat": ph, "se": se,
                               "n_samples": n_samples})


def check_apriori(q: int, k: int, a: float, beta: float,
                  eps: float = 1.0) -> BoundReport:
    """E[e^{a b^2 psi*_{k,q}}] <= exp((a/pi)(1+eps) q^2 b^2 log(k+1)).

    Exact left side through the joint DP; asserted at the pinned margin
    eps = 1 on the exact grid (q <= 3, k <= 4).
    """
    if q > 3 or k > 4:
        raise CapacityError("a-priori check limited to q <= 3, k <= 4")
    lhs = phi_exact(q, 1, k, [(0, 0)] * q, a * beta * beta)
    rhs = math.exp(a / math.pi * (1.0 + eps) * q * q * beta * beta
                   * math.log(k + 1.0))
    return BoundReport(name="apriori_exponential_moment", lhs=lhs, rhs=rhs,
                       mode="assert", params={"q": q, "k": k, "a": a,
                                              "beta": beta, "eps": eps})


# ---------------------------------------------------------------------------
# large-deviation rates

def ld_rate_report(tails, one_sided: bool = False) -> dict:
    """Trend of the implied rates -log p_hat / x^2 toward 1/2.

    Rows with x = 0 or no exceedances are excluded from the trend; the
    headline value is the rate at the largest x with >= 50 exceedances.
    """
    usable = [te for te in tails
              if te.x > 0 and te.n_exceed >= 50 and 0 < te.p_hat < 1]
    rows = [{"x": te.x, "p_hat": te.p_hat, "rate": te.rate,
             "n_exceed": te.n_exceed, "in_window": te.in_window}
            for te in tails]
    out = {"rows": rows, "limit": 0.5, "one_sided": one_sided,
           "headline_rate": None, "headline_x": None}
    if usable:
        best = max(usable, key=lambda te: te.x)
        out["headline_rate"] = best.rate
        out["headline_x"] = best.x
    return out
