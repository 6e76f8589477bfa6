"""Exhaustive per-diagram checks of the index-calculus lemmas.

Everything here iterates over complete diagram families and asserts the
combinatorial facts the induction scheme rests on:

* classification implications (good => next is long, psi freezing, ...);
* time-sum comparisons ubar_r >= u_(r-1) and ubar_r >= u_{r-1}/2, checked
  on deterministic and pseudorandom positive integer time vectors;
* the bad-index budget n_bad <= 2 n_small + m/L + 2;
* growth of the c and a coefficient arrays;
* the counting bound on diagrams with a prescribed number of small jumps.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from . import diagrams as dg

__all__ = [
    "check_classification_invariants", "check_time_sum_inequalities",
    "check_bad_budget", "check_c_bound", "check_a_structure",
    "check_counting_bound", "full_combinatorial_report",
]


def _u_vectors(m: int, seed: int = 1234):
    yield [1] * m
    yield list(range(1, m + 1))
    yield list(range(m, 0, -1))
    rng = np.random.default_rng(seed)
    for _ in range(12):
        yield [int(x) for x in rng.integers(1, 50, size=m)]


def _ubar(cls, r: int, u: list) -> float:
    def tail(i):
        k = cls.k_last[r][i]
        return sum(u[k:r - 1])        # u_k indices are 1-based: u[j-1]
    return 0.5 * (tail(cls.i1[r]) + tail(cls.i2[r]))


def _u_paren(cls, r: int, u: list) -> float:
    # u_(r) = sum_{i=psi(r)}^{r} u_i with u_0 = 0
    lo = cls.psi[r]
    return sum(u[max(lo, 1) - 1:r])


def check_classification_invariants(d: dg.Diagram, L: int, L0: int = 3) -> list:
    cls = dg.classify(d, L, L0)
    m = d.m
    bad = []
    if not cls.long_index[1]:
        bad.append("index 1 not long")
    for r in range(1, m + 1):
        if cls.good[r]:
            if r < m and not cls.long_index[r + 1]:
                bad.append(f"good {r} but {r + 1} not long")
            if r == m:
                bad.append(f"index m={m} classified good (must be fresh)")
            if cls.psi[r - 1] != cls.psi[r]:
                bad.append(f"good {r} but psi moved")
        if cls.small_index[r]:
            if cls.psi[r] != r or cls.psi[r - 1] != r - 1:
                bad.append(f"small {r}: psi not frozen at r, r-1")
    for r in sorted(cls.stopping):
        if 1 <= r <= m and not cls.fresh[r]:
            bad.append(f"stopping index {r} not fresh")
    return bad


def check_time_sum_inequalities(d: dg.Diagram, L: int, L0: int = 3) -> list:
    cls = dg.classify(d, L, L0)
    m = d.m
    bad = []
    for u in _u_vectors(m):
        for r in range(1, m + 1):
            ub = _ubar(cls, r, u)
            if cls.long_index[r] and ub < _u_paren(cls, r - 1, u) - 1e-9:
                bad.append(f"long {r}: ubar {ub} < u_({r - 1})")
            if r >= 2 and ub < u[r - 2] / 2.0 - 1e-9:
                bad.append(f"r={r}: ubar {ub} < u_(r-1)/2")
    return bad


def check_bad_budget(d: dg.Diagram, L: int, L0: int = 3):
    cls = dg.classify(d, L, L0)
    bound = 2 * cls.n_small + d.m / L + 2
    return cls.n_bad, bound, cls.n_bad <= bound + 1e-12


def check_c_bound(d: dg.Diagram, L: int, delta: float, L0: int = 3):
    """c_i^m <= (1+delta)^i (1+2/delta)^{n_bad}; returns worst ratio."""
    rows, cls = dg.c_coeffs(d, L, L0)
    worst = 0.0
    for k, row in enumerate(rows):
        for i, c in enumerate(row):
            cap = (1 + delta) ** i * (1 + 2 / delta) ** cls.n_bad
            worst = max(worst, c / cap)
    return worst, worst <= 1.0 + 1e-12


def check_a_structure(d: dg.Diagram, L: int, deltas=(0.1, 0.25, 0.45),
                      L0: int = 3):
    """Zero pattern and growth bound of a_l^k on an extended diagram."""
    rows, cls, gamma = dg.a_coeffs(d, L, L0)
    n_of_k = [0]
    for g in gamma:
        n_of_k.append(n_of_k[-1] + g)
    problems = []
    worst = 0.0
    for k, row in enumerate(rows):
        nk = n_of_k[k]
        for l, a in enumerate(row):
            if l > nk and a != 0:
                problems.append(f"a_{l}^{k} = {a} nonzero beyond n_k={nk}")
            if l <= nk:
                for delta in deltas:
                    cap = (2.0 ** nk) * (1 + 2 * delta) ** k \
                        * delta ** -(nk - l)
                    worst = max(worst, a / cap)
    return worst, problems, worst <= 1.0 + 1e-12 and not problems


def check_counting_bound(m: int, q: int, L: int, L0: int = 3):
    """|D^(n)(m, q)| against C(m-1, n) C(q,2) (C(q,2)-1)^{m-1-n} (2qL)^n."""
    counts = dg.count_diagrams_by_small(m, q, L, L0)
    cq2 = math.comb(q, 2)
    rows = []
    ok = True
    for n, cnt in sorted(counts.items()):
        cap = (math.comb(m - 1, n) * cq2 * (cq2 - 1) ** (m - 1 - n)
               * (2 * q * L) ** n)
        rows.append({"n_small": n, "count": cnt, "bound": cap,
                     "holds": cnt <= cap})
        ok &= cnt <= cap
    return rows, ok


def full_combinatorial_report(m_max: int = 5, q: int = 3,
                              L_values=(2, 3), deltas=(0.1, 1.0),
                              L0: int = 3) -> dict:
    """Exhaustive verification over D(m, q, 2), m <= m_max (plus the
    extended family for the a recursion)."""
    rep = {}
    cls_bad, time_bad = [], []
    worst_budget = 0.0
    worst_c = 0.0
    for L in L_values:
        for m in range(1, m_max + 1):
            for d in dg.enumerate_diagrams(m, q, p0=2):
                cls_bad += check_classification_invariants(d, L, L0)
                time_bad += check_time_sum_inequalities(d, L, L0)
                nb, cap, _ = check_bad_budget(d, L, L0)
                worst_budget = max(worst_budget, nb / cap)
                for delta in deltas:
                    w, _ = check_c_bound(d, L, delta, L0)
                    worst_c = max(worst_c, w)
    rep["classification_implications"] = {
        "holds": not cls_bad, "worst": float(len(cls_bad)), "bound": 0.0,
        "detail": cls_bad[:5]}
    rep["time_sum_inequalities"] = {
        "holds": not time_bad, "worst": float(len(time_bad)), "bound": 0.0,
        "detail": time_bad[:5]}
    rep["bad_index_budget"] = {
        "holds": worst_budget <= 1.0, "worst": worst_budget, "bound": 1.0}
    rep["c_coefficient_bound"] = {
        "holds": worst_c <= 1.0 + 1e-12, "worst": worst_c, "bound": 1.0}

    worst_a = 0.0
    a_problems = []
    for L in L_values:
        for m in range(0, m_max):
            for d in dg.enumerate_extended_diagrams(m, q):
                w, probs, _ = check_a_structure(d, L, L0=L0)
                worst_a = max(worst_a, w)
                a_problems += probs
    rep["a_coefficient_structure"] = {
        "holds": worst_a <= 1.0 + 1e-12 and not a_problems,
        "worst": worst_a, "bound": 1.0, "detail": a_problems[:5]}

    count_ok = True
    worst_ratio = 0.0
    for L in L_values:
        for m in range(1, m_max + 1):
            rows, ok = check_counting_bound(m, q, L, L0)
            count_ok &= ok
            for r in rows:
                worst_ratio = max(worst_ratio, r["count"] / r["bound"])
    rep["diagram_counting_bound"] = {
        "holds": count_ok, "worst": worst_ratio, "bound": 1.0}
    return rep


def verify_counting_bounds(m_max: int, q: int, L: int, p0: int = 2,
                           deltas=(0.1, 1.0), L0: int = 3) -> dict:
    """Per-diagram report over the coefficient and counting bounds.

    Iterates every pair-only diagram up to m_max blocks and asserts the
    bad-index budget, the c-array growth bound for each delta, and the
    small-jump counting bound; reports the worst slack of each family.
    """
    if p0 != 2:
        raise ValueError("exhaustive counting checks run on the pair-only family")
    worst = {"bad_budget": 0.0, "c_bound": 0.0, "counting": 0.0}
    for m in range(1, m_max + 1):
        for d in dg.enumerate_diagrams(m, q, p0=2):
            nb, cap, _ = check_bad_budget(d, L, L0)
            worst["bad_budget"] = max(worst["bad_budget"], nb / cap)
            for delta in deltas:
                w, _ = check_c_bound(d, L, delta, L0)
                worst["c_bound"] = max(worst["c_bound"], w)
        rows, _ = check_counting_bound(m, q, L, L0)
        for r in rows:
            worst["counting"] = max(worst["counting"], r["count"] / r["bound"])
    return {"worst": worst,
            "holds": all(v <= 1.0 + 1e-12 for v in worst.values())}
