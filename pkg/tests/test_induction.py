import math

import pytest

from polylab import induction as ind
from polylab.errors import DomainError


def test_boundary_case_v_equals_t():
    r = ind.check_sum_inequalities(0, 50, 50, 0.01)
    assert r["good_sum"]["lhs"] == 0
    assert r["good_sum"]["rhs"] == 0.0
    assert r["good_sum"]["ok"]


def test_spec_point_examples():
    r = ind.check_sum_inequalities(0, 1, 100, 0.05)
    bt = 1.0 / (1.0 - 0.05 * math.log(100))
    f1 = (math.log((1 - 0.05 * math.log(1)) / (1 - 0.05 * math.log(100)))
          / 0.05)
    assert r["fresh_sum"]["rhs"] == pytest.approx(f1 + bt, rel=1e-12)
    assert r["fresh_sum"]["ok"]
    r2 = ind.check_sum_inequalities(2, 10, 1000, 0.02)
    assert all(v["ok"] for v in r2.values())


def test_grid_zero_violations():
    checked = 0
    for j in range(0, 5):
        for t in (100, 1000, 10000):
            for s in (0.02, 0.05, 0.1):
                if s * math.log(t) >= 0.95:
                    continue
                for v in (1, 2, 7, t // 10, t // 2, t):
                    rs = ind.check_sum_inequalities(j, int(max(1, v)), t, s)
                    assert all(x["ok"] for x in rs.values()), (j, v, t, s)
                    checked += 1
    assert checked >= 200


def test_integral_grid_zero_violations():
    checked = 0
    for j in range(0, 5):
        for t in (50, 400, 2000):
            for s in (0.02, 0.05):
                if s * ind.b_func(t, s) >= 1.0:
                    continue
                for v in (0.0, 0.5, 1.0, 3.0, t / 2, float(t)):
                    rr = ind.check_integral_inequalities(j, v, t, s)
                    assert all(x["ok"] for x in rr.values()), (j, v, t, s)
                    checked += 1
    assert checked >= 150


def test_quadrature_against_closed_form():
    # S^good with j = 0, v >= 1 integrates F(x)^2 over [v, t]
    s = 0.03
    t = 500.0
    v = 2.0
    val = ind.Sgood(0, v, t, s, tol=1e-10)
    import scipy.integrate as si
    ref, _ = si.quad(lambda x: ind.F_func(x, s, extended=True) ** 2, v, t,
                     limit=200)
    assert val == pytest.approx(ref, rel=1e-7)


def test_b_bar_margin_domain():
    with pytest.raises(DomainError):
        ind.b_bar(math.exp(19.0), 0.05)
    assert ind.b_bar(1.0, 0.05) > 3.0 - 1e-12


def test_operators_monotone_in_j():
    # f <= f(1) so higher powers shrink once f < 1; just sanity-run shapes
    s = 0.05
    t = 200
    a = ind.Ffresh(lambda u: 1.0, 3, t, s)
    b = ind.Fgood(lambda u: 1.0, 3, t, s)
    assert a >= b > 0
