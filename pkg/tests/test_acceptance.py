"""Acceptance criteria, one test per criterion, with a PASS line each.

Run as:  pytest tests/test_acceptance.py -v -s
The Monte Carlo criteria (10, 11) dominate the runtime; on a 2-core
machine the full module takes ~25 minutes.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from polylab import (bounds, diagrams, expansion, induction, laws,
                     montecarlo as mc, moments, presets, schedules as sch,
                     walks)
from polylab.verify_combinatorics import full_combinatorial_report

G = laws.gaussian()
R = laws.rademacher()


def _report(num, ok, detail):
    print(f"\nACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_01_triple_oracle_agreement():
    t0 = time.time()
    n_inst = 0
    worst = 0.0
    for law in (G, R):
        for beta in (0.2, 0.5, 1.0):
            for q, t in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)]:
                starts = [(0, 0)] * q
                tm = moments.moment_exact_tm(q, 1, t, starts, law, beta)
                pa = moments.moment_exact_paths(q, 1, t, starts, law, beta)
                worst = max(worst, abs(tm - pa) / tm)
                n_inst += 1
                if law.kind == "rademacher" and t <= 2:
                    env = moments.moment_exact_env(q, 1, t, starts, law, beta)
                    worst = max(worst, abs(tm - env) / tm)
    dt = time.time() - t0
    _report(1, n_inst >= 30 and worst <= 1e-10 and dt <= 120,
            f"{n_inst} instances, worst rel err {worst:.2e}, {dt:.0f}s")


def test_criterion_02_expansion_equals_phi_and_monotone():
    worst = 0.0
    mono = True
    for t in (1, 2, 3):
        L2 = math.log1p(0.45)
        starts = [(0, 0)] * 3
        phi = moments.phi_exact(3, 1, t, starts, L2)
        full = expansion.truncated_expansion(3, 1, t, starts, L2, diagrams.INF)
        worst = max(worst, abs(full - phi) / phi)
        v2 = expansion.truncated_expansion(3, 1, t, starts, L2, 2)
        v3 = expansion.truncated_expansion(3, 1, t, starts, L2, 3)
        mono &= v2 <= v3 + 1e-14 and v3 <= full + 1e-14
    _report(2, worst <= 1e-10 and mono,
            f"worst rel err {worst:.2e}, monotone in p0: {mono}")


def test_criterion_03_one_step_closed_form():
    worst = 0.0
    for s2 in (0.25, 0.61, 1.0):
        phi = moments.phi_exact(3, 1, 1, [(0, 0)] * 3, math.log1p(s2))
        expect = 1 + 0.75 * s2 + 0.1875 * s2 ** 2 + 0.0625 * s2 ** 3
        worst = max(worst, abs(phi - expect))
    beta = math.sqrt(math.log(2.0))
    two = moments.moment_exact_tm(3, 1, 1, [(0, 0)] * 3, G, beta)
    worst = max(worst, abs(two - 2.0))
    _report(3, worst <= 1e-12, f"worst abs err {worst:.2e} (moment 2.0 at s2=1)")


def test_criterion_04_second_moment_identity_and_bound():
    t0 = time.time()
    s2 = 0.45
    kern = walks.build_collision_kernel(64, sigma2=s2)
    worst = 0.0
    csum = np.cumsum(kern.U)
    for m in range(1, 65):
        dp = walks.two_walk_mgf_dp(m, math.log1p(s2))
        worst = max(worst, abs(csum[m] - dp) / dp)
    n_max = 10_000
    prof = walks.collision_time_R_profile(n_max)
    s2b = 0.95 / prof[-1]
    kern_big = walks.build_collision_kernel(n_max, sigma2=s2b)
    csum_big = np.cumsum(kern_big.U)
    ok_bound = all(csum_big[m] <= 1.0 / (1.0 - s2b * prof[m - 1]) + 1e-12
                   for m in range(1, n_max + 1))
    dt = time.time() - t0
    _report(4, worst <= 1e-10 and ok_bound and dt <= 60,
            f"DP agreement {worst:.2e} (m<=64), renewal bound holds to"
            f" m=1e4, {dt:.0f}s")


def test_criterion_05_kernel_bounds():
    ns = np.arange(1, 10_001)
    pstar = walks.p_star_vec(ns)
    ok_bound = bool(np.all(pstar <= 2.0 / (math.pi * ns) + 1e-15))
    tab = walks.build_kernel_table(128)
    worst = 0.0
    for n in range(1, 65):
        worst = max(worst, abs(tab.p(2 * n, (0, 0))
                               - walks.return_probability(n)))
    prof = walks.collision_time_R_profile(10 ** 6)
    nn = np.arange(1, 10 ** 6 + 1)
    band = prof[10 ** 4 - 1:] - np.log(nn[10 ** 4 - 1:]) / math.pi
    width = float(band.max() - band.min())
    _report(5, ok_bound and worst <= 1e-12 and width < 0.05,
            f"p* bound holds to n=1e4; conv vs binomial {worst:.2e}; "
            f"R_N band width {width:.2e}")


def test_criterion_06_key_lemma_ratio():
    pre = presets.KEY_LEMMA_SUBCRITICAL
    dc = sch.derive_constants(
        sch.Subcritical(pre["beta_hat"], pre["n_max"]), G)
    kern = walks.build_collision_kernel(pre["n_max"], sigma2=dc.sigma2)
    w_grid = [2.0 ** k for k in range(0, 13)]   # 1 .. 4096 <= n_max/2
    res = walks.collision_smoothing_ratio(kern.U, dc.sigma2_bar, w_grid)
    _report(6, res["max_ratio"] <= 1.5,
            f"max ratio {res['max_ratio']:.4f} <= 1.5 over w in 2^0..2^12")


def test_criterion_07_combinatorial_suite():
    t0 = time.time()
    rep = full_combinatorial_report(m_max=5, q=3, L_values=(2, 3),
                                    deltas=(0.1, 1.0))
    bad = [k for k, v in rep.items() if not v["holds"]]
    dt = time.time() - t0
    _report(7, not bad and dt <= 300,
            f"all {len(rep)} check families hold exhaustively "
            f"(m<=5, q=3, L in 2,3), {dt:.0f}s")


def test_criterion_08_induction_inequalities():
    points = 0
    violations = 0
    for j in range(0, 5):
        for t in (100, 1000, 10000):
            for s2b in (0.02, 0.05, 0.08):
                if s2b * math.log(t) >= 0.95:
                    continue
                if s2b * induction.b_func(t, s2b) >= 1.0:
                    continue
                for v in (1, 2, 7, t // 10, t // 2, t):
                    rs = induction.check_sum_inequalities(j, int(max(v, 1)),
                                                          t, s2b)
                    ri = induction.check_integral_inequalities(
                        j, float(max(v, 1)), t, s2b, tol=1e-8)
                    points += 1
                    violations += sum(not r["ok"]
                                      for r in {**rs, **ri}.values())
    _report(8, points >= 200 and violations == 0,
            f"{points} grid points x 6 inequalities, {violations} violations")


def test_criterion_09_collision_event_bound():
    ok = True
    for p in (1, 2):
        for n in range(1, 7):
            rep = bounds.check_collision_event_bound(3, p, n)
            ok &= rep.holds
    rep_mc = bounds.check_collision_event_bound(5, 3, 100, n_samples=20_000,
                                                seed=17)
    ok &= rep_mc.holds
    mid = bounds.check_collision_event_bound(5, 3, 10, n_samples=20_000,
                                             seed=18)
    ok &= mid.holds
    _report(9, ok, "exact q=3 p in {1,2} n<=6 and MC q=5 p=3 hold")


def test_criterion_10_clt_band():
    pre = presets.CLT_SUBCRITICAL
    t0 = time.time()
    ks, lam2 = mc.clt_diagnostic(pre["N"], sch.Subcritical(pre["beta_hat"],
                                                           pre["N"]),
                                 presets.law_by_name(pre["law"]),
                                 pre["n_samples"], pre["seed"],
                                 rfac=pre["rfac"], threads=2)
    dt = time.time() - t0
    _report(10, ks <= 0.05 and dt <= 600 and
            abs(lam2 - math.log(4.0 / 3.0)) < 1e-12,
            f"KS {ks:.4f} <= 0.05 vs Normal(-l2/2, l2), l2=log(4/3); "
            f"runtime {dt:.0f}s <= 600s (N=4096, 1e4 samples)")


def test_criterion_11_large_deviation_rates():
    pre = presets.TAIL_SUBCRITICAL
    tails = mc.estimate_tail(pre["N"], sch.Subcritical(pre["beta_hat"],
                                                       pre["N"]),
                             presets.law_by_name(pre["law"]),
                             list(pre["x_grid"]), pre["n_samples"],
                             pre["seed"], rfac=pre["rfac"], threads=2)
    rep = bounds.ld_rate_report(tails)
    rate = rep["headline_rate"]
    ok_sc = rate is not None and 0.3 <= rate <= 0.8

    preq = presets.TAIL_QUASICRITICAL
    N = preq["N"]
    schq = sch.QuasiCritical(math.log(N) ** preq["theta_exponent"], N)
    tails_q = mc.estimate_tail(N, schq, presets.law_by_name(preq["law"]),
                               list(preq["x_grid"]), preq["n_samples"],
                               preq["seed"], rfac=preq["rfac"], threads=2)
    rep_q = bounds.ld_rate_report(tails_q, one_sided=True)
    rate_q = rep_q["headline_rate"]
    ok_qc = rate_q is not None and rate_q >= 0.3
    _report(11, ok_sc and ok_qc,
            f"subcritical rate {rate} at x={rep['headline_x']} in [0.3, 0.8]; "
            f"quasi-critical one-sided rate {rate_q} >= 0.3")


def test_criterion_12_manifest_replay_thread_counts():
    import tempfile
    outs = {}
    with tempfile.TemporaryDirectory() as td:
        for nt in (1, 4, 16):
            out = os.path.join(td, f"t{nt}")
            env = dict(os.environ, NUMBA_NUM_THREADS=str(max(nt, 1)))
            cmd = [sys.executable, "-m", "polylab.cli", "moment-mc",
                   "--q", "2", "--N", "32", "--samples", "400",
                   "--law", "rademacher", "--schedule", "subcritical",
                   "--beta-hat", "0.45", "--seed", "77",
                   "--threads", str(nt), "--out", out]
            res = subprocess.run(cmd, capture_output=True, text=True,
                                 env=env)
            assert res.returncode == 0, res.stderr
            with open(os.path.join(out, "manifest.json")) as fh:
                outs[nt] = json.load(fh)["outputs"]
    same = outs[1] == outs[4] == outs[16]
    _report(12, same, f"artifact hashes identical across threads 1/4/16: "
            f"{sorted(outs[1])}")
