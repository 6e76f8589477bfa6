import math

import pytest

from polylab import expansion, moments
from polylab.diagrams import INF

Z3 = [(0, 0)] * 3
Z2 = [(0, 0)] * 2


def test_one_slice_truncations():
    s2 = 0.4
    L2 = math.log1p(s2)
    assert expansion.truncated_expansion(3, 1, 1, Z3, L2, p0=2) == \
        pytest.approx(1 + 0.75 * s2, rel=1e-12)
    full = expansion.truncated_expansion(3, 1, 1, Z3, L2, p0=INF)
    assert full == pytest.approx(1 + 0.75 * s2 + 0.1875 * s2 ** 2
                                 + 0.0625 * s2 ** 3, rel=1e-12)


def test_zero_coupling():
    for p0 in (2, 3, INF):
        assert expansion.truncated_expansion(3, 1, 2, Z3, 0.0, p0) == \
            pytest.approx(1.0)


@pytest.mark.parametrize("t", [1, 2, 3])
def test_full_expansion_equals_phi(t):
    L2 = math.log1p(0.45)
    phi = moments.phi_exact(3, 1, t, Z3, L2)
    tr = expansion.truncated_expansion(3, 1, t, Z3, L2, INF)
    assert tr == pytest.approx(phi, rel=1e-10)


def test_expansion_q2_and_later_start():
    L2 = math.log1p(0.3)
    for (s, t) in [(1, 2), (2, 3)]:
        phi = moments.phi_exact(2, s, t, Z2, L2)
        tr = expansion.truncated_expansion(2, s, t, Z2, L2, INF)
        assert tr == pytest.approx(phi, rel=1e-10)


def test_monotone_in_p0():
    L2 = math.log1p(0.5)
    vals = [expansion.truncated_expansion(3, 1, 2, Z3, L2, p0)
            for p0 in (2, 3, INF)]
    assert vals[0] <= vals[1] + 1e-14
    assert vals[1] <= vals[2] + 1e-14


def test_u_block_renewal_identity():
    L2 = math.log1p(0.35)
    chk = expansion.u_block_identity_check([(1, 2)], Z2, 4, L2)
    assert chk["rel_err"] <= 1e-10
    chk3 = expansion.u_block_identity_check([(1, 2), (1, 3)], Z3, 3, L2)
    assert chk3["rel_err"] <= 1e-10
    # separated starts
    chk_sep = expansion.u_block_identity_check([(1, 2)], [(0, 0), (2, 0)], 3, L2)
    assert chk_sep["rel_err"] <= 1e-10


def test_u_block_time_zero_convention():
    L2 = 0.3
    assert expansion.u_block(0, Z2, [(1, 2)], [(1, 2)], L2) == 1.0
    assert expansion.u_block(0, Z2, [(1, 2)], [], L2) == 0.0
    v = expansion.u_block(1, Z2, [(1, 2)], [(1, 2)], L2)
    # sigma^2 * P(two walks meet after one step) = sigma^2 * p_2(0)
    assert v == pytest.approx(math.expm1(L2) * 0.25, rel=1e-12)
