"""Numeric verification of the induction-step inequalities.

Sum operators (exact summation), acting on f^j with f' = -F:

    Ffresh h(v) = sum_{u=1..t} F(u+v)   h(u)   1{u+v <= t}
    Fgood  h(v) = sum_{u=1..t} F(u+v)   h(u+v) 1{u+v <= t}
    Fsmall h(v) = Ffresh h(v/2)

must satisfy, for integer 1 <= v <= t and j >= 0,

    Ffresh f^j(v) <= f(v)^{j+1}/(j+1) + sum_{i<=j} j!/(j-i)! b_t^{i+1} f(v)^{j-i}
    Fsmall f^j(v) <= f(v)^{j+1}/(j+1) + 2 * (same sum)
    Fgood  f^j(v) <= f(v)^{j+1}/(j+1)

Integral operators (adaptive Simpson), acting on h_j(u) = F(u) g(u)^j with
the extended F (identically 1 below u = 1) and g' = F, g = 0 on [0, 1]:

    Sfresh h_j(v) <= sum_{i=0..j+1} j!/i! bb^{j+1-i} h_i(v)
    Ssmall h_j(v) <= 2 h_{j+1}(v)/(j+1) + sum_{i=0..j} j!/i! bb^{j+1-i} h_i(v)
    Sgood  h_j(v) <= sum_{i=0..j}   j!/i! bb^{j+1-i} h_i(v)

with bb = 2 + b_t (1 + eps), where eps = s b_t / (1 - s b_t) is the exact
curvature margin making F(u)^2 <= (bb - 2) (-F'(u)) on [1, t].
"""

from __future__ import annotations

import math

from .errors import DomainError, QuadratureError
from .schedules import F_func, b_func, f_func, g_func

__all__ = [
    "Ffresh", "Fgood", "Fsmall", "check_sum_inequalities",
    "Sfresh", "Sgood", "Ssmall", "check_integral_inequalities",
    "b_bar",
]


# ---------------------------------------------------------------------------
# sum operators

def Ffresh(h, v, t, s2b):
    return sum(F_func(u + v, s2b) * h(u) for u in range(1, int(t - v) + 1))


def Fgood(h, v, t, s2b):
    return sum(F_func(u + v, s2b) * h(u + v) for u in range(1, int(t - v) + 1))


def Fsmall(h, v, t, s2b):
    vv = v / 2.0
    return sum(F_func(u + vv, s2b) * h(u)
               for u in range(1, int(math.floor(t - vv)) + 1))


def check_sum_inequalities(j: int, v: int, t: int, s2b: float) -> dict:
    """LHS/RHS rows for the three sum-operator inequalities at one point."""
    if not (1 <= v <= t):
        raise DomainError("need 1 <= v <= t")
    bt = b_func(t, s2b)
    f = lambda u: f_func(u, t, s2b)
    fj = lambda u: f(u) ** j
    fv = f(v)
    tail = sum(math.factorial(j) / math.factorial(j - i) * bt ** (i + 1)
               * fv ** (j - i) for i in range(j + 1))
    lead = fv ** (j + 1) / (j + 1)
    rows = []
    rows.append(("fresh_sum", Ffresh(fj, v, t, s2b), lead + tail))
    rows.append(("small_sum", Fsmall(fj, v, t, s2b), lead + 2 * tail))
    rows.append(("good_sum", Fgood(fj, v, t, s2b), lead))
    return {name: {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs + 1e-12,
                   "slack": rhs - lhs}
            for name, lhs, rhs in rows}


# ---------------------------------------------------------------------------
# integral operators

def _simpson(fun, a, b, tol, depth=48):
    """Adaptive Simpson with absolute tolerance ``tol`` on [a, b]."""
    def simp(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def rec(x0, x2, f0, f1, f2, whole, d):
        xm = 0.5 * (x0 + x2)
        lm, rm = 0.5 * (x0 + xm), 0.5 * (xm + x2)
        flm, frm = fun(lm), fun(rm)
        left = simp(x0, xm, f0, flm, f1)
        right = simp(xm, x2, f1, frm, f2)
        if d <= 0:
            raise QuadratureError("adaptive Simpson recursion exhausted")
        if abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (rec(x0, xm, f0, flm, f1, left, d - 1)
                + rec(xm, x2, f1, frm, f2, right, d - 1))

    if b <= a:
        return 0.0
    fa, fm, fb = fun(a), fun(0.5 * (a + b)), fun(b)
    return rec(a, b, fa, fm, fb, simp(a, b, fa, fm, fb), depth)


def _integrate(fun, a, b, breakpoints, tol):
    pts = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    return sum(_simpson(fun, x0, x1, tol) for x0, x1 in zip(pts, pts[1:]))


def _h(j, u, s2b):
    return F_func(u, s2b, extended=True) * g_func(u, s2b) ** j


def Sfresh(j, v, t, s2b, tol=1e-8):
    fun = lambda u: F_func(u + v, s2b, extended=True) * _h(j, u, s2b)
    return _integrate(fun, 0.0, t - v, [1.0, 1.0 - v], tol)


def Ssmall(j, v, t, s2b, tol=1e-8):
    vv = v / 2.0
    fun = lambda u: F_func(u + vv, s2b, extended=True) * _h(j, u, s2b)
    return _integrate(fun, 0.0, t - vv, [1.0, 1.0 - vv], tol)


def Sgood(j, v, t, s2b, tol=1e-8):
    fun = lambda u: (F_func(u + v, s2b, extended=True)
                     * _h(j, u + v, s2b))
    return _integrate(fun, 0.0, t - v, [1.0 - v], tol)


def b_bar(t: float, s2b: float) -> float:
    """bb_t = 2 + b_t (1 + eps) with the exact curvature margin eps.

    eps = s b_t / (1 - s b_t) makes b_t (1 + eps) = sup_{u<=t} F^2 / (-F'),
    the smallest constant for which the integration-by-parts step holds.
    """
    bt = b_func(t, s2b)
    if s2b * bt >= 1.0:
        raise DomainError("need sigma2_bar * b_t < 1 for the margin")
    eps = s2b * bt / (1.0 - s2b * bt)
    return 2.0 + bt * (1.0 + eps)


def check_integral_inequalities(j: int, v: float, t: float, s2b: float,
                                tol: float = 1e-8) -> dict:
    """LHS/RHS rows for the three integral-operator inequalities."""
    if not (0.0 <= v <= t):
        raise DomainError("need 0 <= v <= t")
    bb = b_bar(t, s2b)
    hv = [_h(i, v, s2b) for i in range(j + 2)]
    tail_j = sum(math.factorial(j) / math.factorial(i) * bb ** (j + 1 - i)
                 * hv[i] for i in range(j + 1))
    rows = [
        ("fresh_int", Sfresh(j, v, t, s2b, tol),
         tail_j + hv[j + 1] / (j + 1)),
        ("small_int", Ssmall(j, v, t, s2b, tol),
         2.0 * hv[j + 1] / (j + 1) + tail_j),
        ("good_int", Sgood(j, v, t, s2b, tol), tail_j),
    ]
    return {name: {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs + 1e-9,
                   "slack": rhs - lhs}
            for name, lhs, rhs in rows}


def verify_induction_inequalities(t, sigma2_bar, j_grid, v_grid,
                                  tol: float = 1e-8) -> dict:
    """Grid report over the sum- and integral-operator inequalities.

    Returns per-point rows plus the violation count (which must be zero).
    """
    rows = []
    violations = 0
    for j in j_grid:
        for v in v_grid:
            if not (1 <= v <= t):
                continue
            rs = check_sum_inequalities(int(j), int(v), int(t), sigma2_bar)
            ri = check_integral_inequalities(int(j), float(v), float(t),
                                             sigma2_bar, tol)
            for name, r in {**rs, **ri}.items():
                rows.append({"j": j, "v": v, "t": t, "check": name,
                             "lhs": r["lhs"], "rhs": r["rhs"],
                             "holds": r["ok"]})
                violations += 0 if r["ok"] else 1
    return {"rows": rows, "violations": violations, "points": len(rows)}
