import math

import pytest

from polylab import laws, schedules as sch, walks
from polylab.errors import DomainError, InvalidRegimeError, NoRootError


def test_subcritical_constants():
    g = laws.gaussian()
    dc = sch.derive_constants(sch.Subcritical(0.5, 1000), g)
    assert dc.beta_N ** 2 * dc.R_N == pytest.approx(0.25, rel=1e-13)
    assert dc.sigma2 == pytest.approx(math.expm1(dc.beta_N ** 2), rel=1e-13)
    assert dc.sigma2_bar == pytest.approx(dc.sigma2 / math.pi, rel=1e-15)
    assert dc.lambda2 == pytest.approx(math.log(4.0 / 3.0), rel=1e-13)


def test_subcritical_unit_RN_example():
    # R_N = 1 synthetic case: beta_N^2 = bh^2, sigma2 = e^{0.25} - 1
    g = laws.gaussian()
    beta = 0.5 / math.sqrt(1.0)
    assert g.sigma2(beta) == pytest.approx(0.284025, abs=1e-6)


def test_quasicritical_root():
    g = laws.gaussian()
    N = 10_000
    dc = sch.derive_constants(sch.QuasiCritical(3.0, N), g)
    target = (1 - 3.0 / math.log(N)) / dc.R_N
    assert dc.sigma2 * dc.R_N == pytest.approx(1 - 3.0 / math.log(N), abs=1e-12)
    assert abs(g.sigma2(dc.beta_N) - target) <= 1e-12
    assert dc.lambda2 == pytest.approx(math.log(math.log(N) / 3.0), rel=1e-13)


def test_closed_form_inversion():
    # bisection against the closed form sqrt(log 1.1) = 0.3087234...
    g = laws.gaussian()
    beta = sch._solve_beta(g, 0.1)
    assert beta == pytest.approx(math.sqrt(math.log(1.1)), abs=1e-9)
    assert beta == pytest.approx(0.308723, abs=1e-5)


def test_no_root_for_bounded_law():
    # Rademacher pair energy saturates at sigma2 = 1
    r = laws.rademacher()
    with pytest.raises(NoRootError):
        sch._solve_beta(r, 1.5)


def test_regime_validation():
    with pytest.raises(InvalidRegimeError):
        sch.Subcritical(1.2, 100)
    with pytest.raises(InvalidRegimeError):
        sch.QuasiCritical(0.5, 100)       # theta must exceed 1
    with pytest.raises(InvalidRegimeError):
        sch.QuasiCritical(10.0, 100)      # theta < log N fails
    sch.theta_power_log(0.5)
    with pytest.raises(InvalidRegimeError):
        sch.theta_power_log(1.5)


def test_explicit_zero_coupling():
    g = laws.gaussian()
    dc = sch.derive_constants(sch.Explicit(0.0, 64), g)
    assert dc.sigma2 == 0.0
    assert dc.lambda2 == 0.0


def test_lambda2_stN_examples():
    assert sch.lambda2_stN(5.0, 5.0, 0.1) == 0.0
    val = sch.lambda2_stN(1.0, math.exp(5.0), 0.1)
    assert val == pytest.approx(math.log(2.0), rel=1e-12)
    # additivity (telescoping), to 1e-12
    a = sch.lambda2_stN(1.0, math.exp(2.0), 0.1)
    b = sch.lambda2_stN(math.exp(2.0), math.exp(4.0), 0.1)
    c = sch.lambda2_stN(1.0, math.exp(4.0), 0.1)
    assert a + b == pytest.approx(c, abs=1e-12)


def test_scalar_function_basics():
    s = 0.05
    assert sch.F_func(1.0, s) == 1.0
    assert sch.b_func(1.0, s) == 1.0
    assert sch.f_func(100.0, 100.0, s) == 0.0
    assert sch.g_func(0.5, s) == 0.0
    assert sch.g_func(1.0, s) == 0.0
    with pytest.raises(DomainError):
        sch.F_func(0.5, s)
    assert sch.F_func(0.5, s, extended=True) == 1.0
    with pytest.raises(DomainError):
        sch.b_func(math.exp(21.0), s)     # log-domain violation


def test_derivative_identities_finite_differences():
    s = 0.05
    t = 1000.0
    h = 1e-4
    import numpy as np
    rng = np.random.default_rng(0)
    for v in rng.uniform(2.0, t / 2, size=100):
        dfdv = (sch.f_func(v + h, t, s) - sch.f_func(v - h, t, s)) / (2 * h)
        assert dfdv == pytest.approx(-sch.F_func(v, s), rel=1e-6)
        dgdx = (sch.g_func(v + h, s) - sch.g_func(v - h, s)) / (2 * h)
        assert dgdx == pytest.approx(sch.F_func(v, s), rel=1e-6)


def test_F_prime_closed_form():
    # F'(u) = -(1+eps) F(u)^2 (1 - s log u) with eps = -s/(1 - s log u),
    # checked against central differences on a grid
    s = 0.04
    h = 1e-5
    for u in (1.5, 3.0, 10.0, 100.0, 5000.0):
        fd = (sch.F_func(u + h, s) - sch.F_func(u - h, s)) / (2 * h)
        closed, eps = sch.F_prime_exact(u, s)
        assert closed == pytest.approx(fd, rel=1e-7)
        assert eps == pytest.approx(-s / (1 - s * math.log(u)), rel=1e-13)


def test_b1_and_F_are_linked():
    s = 0.03
    for u in (1.0, 2.0, 50.0):
        assert sch.F_func(u, s) == pytest.approx(sch.b_func(u, s) / u, rel=1e-15)
