import math

import numpy as np
import pytest

from polylab import laws, montecarlo as mc, polymer, schedules as sch, slabs, walks
from polylab.errors import DomainError, OverflowGuardError

R = laws.rademacher()
G = laws.gaussian()


def test_kernel_matches_slab_reference_all_laws():
    for law, beta, N in [(R, 0.7, 6), (G, 0.4, 5),
                         (laws.uniform_scaled(), 0.9, 4),
                         (laws.discrete_table([-1, 0, 2], [0.3, 0.4, 0.3]), 0.5, 4)]:
        schd = sch.Explicit(beta, N)
        lw = mc.sample_logW(N, schd, law, 3, seed=42, rfac=50.0, double=True)
        for k in range(3):
            slab = slabs.sample_slab(law, N, [(0, 0)], seed=42, sample=k)
            ref = polymer.partition_function(slab, (0, 0), 1, N, beta, law)
            assert lw[k] == pytest.approx(ref.log_W, abs=1e-11)


def test_determinism_across_thread_counts_and_reruns():
    schd = sch.Subcritical(0.5, 64)
    a = mc.sample_logW(64, schd, R, 48, seed=7, threads=1)
    b = mc.sample_logW(64, schd, R, 48, seed=7, threads=2)
    c = mc.sample_logW(64, schd, R, 48, seed=7, threads=2)
    assert np.array_equal(a, b) and np.array_equal(b, c)


def test_f32_f64_consistency():
    schd = sch.Subcritical(0.5, 128)
    l32 = mc.sample_logW(128, schd, R, 8, seed=11, rfac=5.0)
    l64 = mc.sample_logW(128, schd, R, 8, seed=11, rfac=5.0, double=True)
    assert np.abs(l32 - l64).max() < 1e-5


def test_truncation_bias_is_small_at_default_rfac():
    schd = sch.Subcritical(0.5, 256)
    full = mc.sample_logW(256, schd, R, 16, seed=5, rfac=20.0, double=True)
    trunc = mc.sample_logW(256, schd, R, 16, seed=5, rfac=4.0, double=True)
    assert np.abs(trunc - full).max() < 0.01


def test_estimate_moment_q1_and_zero_coupling():
    schd = sch.Subcritical(0.3, 32)
    est = mc.estimate_moment(1, 32, schd, R, 400, seed=3)
    assert abs(est.mean - 1.0) <= 4 * est.std_error + 1e-9
    z = mc.estimate_moment(2, 32, sch.Explicit(0.0, 32), G, 100, seed=1)
    assert z.mean == 1.0 and z.std_error == 0.0


def test_estimate_moment_q2_matches_renewal():
    N = 64
    schd = sch.Subcritical(0.1, N)
    dc = sch.derive_constants(schd, G)
    kern = walks.build_collision_kernel(N, sigma2=dc.sigma2)
    exact = float(kern.U.sum())
    est = mc.estimate_moment(2, N, schd, G, 4000, seed=9)
    assert abs(est.mean - exact) <= 4 * est.std_error


def test_mc_exact_grid_mostly_within_4_sigma():
    hits = 0
    total = 0
    for i, (bh, N) in enumerate([(0.1, 16), (0.2, 16), (0.3, 32), (0.4, 32),
                                 (0.5, 24), (0.15, 48), (0.25, 24),
                                 (0.35, 16), (0.45, 48), (0.12, 64)]):
        for q in (1, 2):
            schd = sch.Subcritical(bh, N)
            dc = sch.derive_constants(schd, R)
            if q == 1:
                exact = 1.0
            else:
                kern = walks.build_collision_kernel(N, sigma2=dc.sigma2)
                exact = float(kern.U.sum())
            est = mc.estimate_moment(q, N, schd, R, 1500, seed=100 + i)
            total += 1
            if abs(est.mean - exact) <= 4 * max(est.std_error, 1e-12):
                hits += 1
    assert hits >= 0.95 * total - 1e-9


def test_heavy_tail_guard():
    schd = sch.Explicit(3.0, 24)
    with pytest.raises(OverflowGuardError):
        mc.estimate_moment(1000, 24, schd, R, 50, seed=1)


def test_clt_diagnostic_small():
    schd = sch.Subcritical(0.5, 128)
    ks, lam2 = mc.clt_diagnostic(128, schd, R, 600, seed=13)
    assert lam2 == pytest.approx(math.log(4.0 / 3.0), rel=1e-13)
    assert 0.0 < ks < 0.2
    with pytest.raises(DomainError):
        mc.clt_diagnostic(64, sch.Explicit(0.4, 64), R, 100, seed=1)


def test_estimate_tail_structure():
    schd = sch.Subcritical(0.5, 64)
    tails = mc.estimate_tail(64, schd, R, [0.0, 1.0, 8.0], 800, seed=21)
    t0, t1, t8 = tails
    assert t0.rate is None                        # x = 0 flagged
    assert 0.2 <= t0.p_hat <= 0.8
    assert t0.ci_low <= t0.p_hat <= t0.ci_high
    assert t1.n_exceed > 0 and t1.rate is not None
    # far threshold: zero exceedances -> lower-bound rate from Wilson top
    assert t8.p_hat == 0.0
    assert t8.ci_high > 0.0
    assert t8.rate is not None and t8.rate_is_lower_bound
    assert not t8.in_window


def test_wilson_interval_sane():
    lo, hi = mc._wilson(0, 100)
    assert lo == 0.0 and 0.0 < hi < 0.05
    lo, hi = mc._wilson(50, 100)
    assert lo < 0.5 < hi


def test_martingale_mean_gaussian_1e5_slabs():
    # E[W] = 1; 1e5 Gaussian environments at N = 8, beta = 0.3
    schd = sch.Explicit(0.3, 8)
    lw = mc.sample_logW(8, schd, G, 100_000, seed=2024, rfac=10.0, threads=2)
    w = np.exp(lw)
    se = w.std(ddof=1) / math.sqrt(len(w))
    assert abs(w.mean() - 1.0) <= 4 * se


def test_kernel_tiny_horizons_match_slab():
    from polylab import polymer, slabs
    for N in (1, 2, 3):
        schd = sch.Explicit(0.8, N)
        lw = mc.sample_logW(N, schd, R, 3, seed=6, rfac=40.0, double=True)
        for k in range(3):
            slab = slabs.sample_slab(R, N, [(0, 0)], seed=6, sample=k)
            ref = polymer.partition_function(slab, (0, 0), 1, N, 0.8, R)
            assert lw[k] == pytest.approx(ref.log_W, abs=1e-12)
