"""Exact evaluation of the truncated diagram expansion.

The pair-interaction functional E[e^{L2 psi*}] expands into a sum over
diagrams (J_1..J_m), block time windows s <= a_1 <= b_1 < a_2 <= ... <= b_m
<= t and terminal pair-sets I_r.  Each block r contributes

    sigma^{2|J_r|} * 1{J_r coincides at a_r}
    * prod_{a_r < n < b_r} e^{L2 * #{coinciding pairs within supp J_r}}
    * [ (1+sigma^2)^{#coinciding pairs of C_{supp J_r} at b_r} - 1 ]   (a_r<b_r)

where the bracket resums the I_r choices (sigma^{2|I|} over non-empty
coinciding I).  Blocks with a_r = b_r force I_r = J_r and carry only the
first line.  Evaluating each term as a q-walk expectation with per-slice
weights reproduces the expansion exactly; with no support-size truncation
it must equal ``moments.phi_exact`` — that identity is the executable
statement of the expansion theorem.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .diagrams import enumerate_diagrams, INF
from .errors import CapacityError, DomainError
from .moments import JointDP
from .laws import WeightLaw

__all__ = ["truncated_expansion", "u_block", "u_block_identity_check"]


def _time_windows(m, s, t):
    """All block windows s <= a_1 <= b_1 < a_2 <= b_2 < ... <= b_m <= t."""
    out = []

    def rec(prefix, lo):
        r = len(prefix)
        if r == m:
            out.append(tuple(prefix))
            return
        for a in range(lo, t + 1):
            for b in range(a, t + 1):
                rec(prefix + [(a, b)], b + 1)

    rec([], s)
    return out


def truncated_expansion(q, s, t, starts, Lambda2, p0=INF) -> float:
    """Diagram-expansion value of E[e^{L2 psi*_{s,t,q}}], truncated at p0."""
    if not (1 <= s <= t):
        raise DomainError("need 1 <= s <= t")
    if q > 4:
        raise CapacityError("expansion evaluation limited to q <= 4")
    span = t - s + 1
    if span > 6:
        raise CapacityError("expansion evaluation limited to t - s + 1 <= 6")
    sigma2 = math.expm1(Lambda2)
    total = 1.0
    for m in range(1, span + 1):
        windows = _time_windows(m, s, t)
        for d in enumerate_diagrams(m, q, p0):
            bars = d.bars
            pref = sigma2 ** sum(d.sizes())    # prod_r (sigma^2)^{|J_r|}
            for win in windows:
                total += pref * _term_expectation(
                    q, s, starts, d.J, bars, win, Lambda2, sigma2)
    return total


def _term_expectation(q, s, starts, J, bars, win, Lambda2, sigma2) -> float:
    """E over q walks of the per-slice block weights for one (J, windows)."""
    b_last = win[-1][1]
    dp = JointDP(starts, horizon=b_last - s + 1)
    sched = {}
    for r, (a, b) in enumerate(win):
        sched[a] = ("open", r)
        if b > a:
            for n in range(a + 1, b):
                sched[n] = ("inside", r)
            sched[b] = ("close", r)
    for n in range(s, b_last + 1):
        dp.step()
        role = sched.get(n)
        if role is None:
            continue
        kind, r = role
        if kind == "open":
            w = 1.0
            for (i, j) in J[r]:
                w = w * dp.pair_eq(i - 1, j - 1)
            dp.apply(w)
        elif kind == "inside":
            cnt = dp.pair_count(subset={i - 1 for i in bars[r]})
            dp.apply(np.exp(Lambda2 * cnt))
        else:
            cnt = dp.pair_count(subset={i - 1 for i in bars[r]})
            dp.apply((1.0 + sigma2) ** cnt - 1.0)
    return dp.total()


# ---------------------------------------------------------------------------
# explicit U blocks (for the renewal identity over last-intersection times)

def u_block(n, X, J, I, Lambda2) -> float:
    """U(n, X, J, I): starting the support walks at X, interactions inside
    supp J at times 1..n-1, terminal coincidence pattern I at time n.

        n > 0: sigma^{2|I|} E_X[ e^{L2 psi*_{n-1}} prod_{(i,j) in I} 1{S_n^i = S_n^j} ]
        n = 0: 1{J == I}

    Particles are relabeled to the support of J; X lists their starts in
    sorted-particle order.
    """
    J = frozenset(tuple(p) for p in J)
    I = frozenset(tuple(p) for p in I)
    support = sorted({i for p in J for i in p})
    sigma2 = math.expm1(Lambda2)
    if n == 0:
        return 1.0 if J == I else 0.0
    if not I:
        return 0.0
    relab = {p: k for k, p in enumerate(support)}
    dp = JointDP(list(X), horizon=n)
    for step in range(1, n + 1):
        dp.step()
        if step < n:
            dp.apply(np.exp(Lambda2 * dp.pair_count()))
    w = 1.0
    for (i, j) in I:
        w = w * dp.pair_eq(relab[i], relab[j])
    dp.apply(w)
    return sigma2 ** len(I) * dp.total()


def u_block_identity_check(J, X, t, Lambda2) -> dict:
    """Renewal identity: E_X[e^{L2 psi*_{t, supp J}}] = sum_{n<=t} sum_I U(n,X,J,I).

    Decomposing by the last intersection time; returns both sides.
    """
    J = frozenset(tuple(p) for p in J)
    support = sorted({i for p in J for i in p})
    p = len(support)
    if p > 3 or t > 6:
        raise CapacityError("identity check limited to |supp J| <= 3, t <= 6")
    pairs = list(combinations(support, 2))

    dp = JointDP(list(X), horizon=t)
    for _ in range(t):
        dp.step()
        dp.apply(np.exp(Lambda2 * dp.pair_count()))
    lhs = dp.total()

    rhs = 1.0  # n = 0 term: I = J
    for n in range(1, t + 1):
        for k in range(1, len(pairs) + 1):
            for I in combinations(pairs, k):
                rhs += u_block(n, X, J, I, Lambda2)
    return {"lhs": lhs, "rhs": rhs, "rel_err": abs(lhs - rhs) / abs(lhs)}
