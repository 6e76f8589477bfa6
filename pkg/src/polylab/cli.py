"""Command-line front end.

Every subcommand writes its tabular results as CSV plus a JSON manifest
with sha256 hashes of all artifacts; ``replay`` re-runs a manifest and
verifies byte-identity.  ``--emit-plot-data`` adds x/y series files, and
``--figures`` renders matplotlib PNGs alongside the delimited output.

Exit codes: 0 success, 1 failed assertion/gate, 2 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, bounds, diagrams, expansion, induction, laws
from . import montecarlo as mc
from . import moments, presets, reporting, schedules, walks
from .config import load_config, serialize_config
from .errors import CapacityError, GateError, PolylabError


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _manifest(args, command: str, params: dict) -> reporting.RunManifest:
    return reporting.RunManifest(command=command, params=params,
                                 seed=getattr(args, "seed", 0) or 0)


def _law(args) -> laws.WeightLaw:
    if getattr(args, "law_table", None):
        spec = json.loads(args.law_table)
        return laws.discrete_table(spec["values"], spec["probs"])
    return presets.law_by_name(args.law)


def _schedule(args, N: int):
    return presets.schedule_from(args.schedule, N, beta_hat=args.beta_hat,
                                 theta=args.theta, beta=args.beta,
                                 theta_exponent=args.theta_exponent)


def _maybe_figure(args, man, path, plot_fn):
    if args.figures:
        reporting.render_figure(path, plot_fn)
        man.add(path)


# ---------------------------------------------------------------------------
# subcommands

def cmd_kernel(args) -> int:
    out = _outdir(args)
    man = _manifest(args, "kernel", {"n_max": args.n_max, "RN": args.RN,
                                     "sigma2": args.sigma2,
                                     "z_max_n": args.z_max_n})
    rows = []
    if args.RN:
        r = walks.collision_time_R(args.RN)
        print(f"R_{args.RN} = {r!r}  (collision count, dimensionless)")
        rows.append({"name": f"R_{args.RN}", "value": r, "scale": "count"})
    if args.n_max:
        tab = walks.build_kernel_table(args.n_max)
        kpath = os.path.join(out, "kernel_table.csv")
        krows = []
        c = tab.n_max
        for n in range(tab.n_max + 1):
            nz = np.argwhere(tab.values[n] > 0)
            for i, j in nz:
                krows.append({"n": n, "x1": int(i - c), "x2": int(j - c),
                              "value": float(tab.values[n][i, j])})
        reporting.write_csv(kpath, ["n", "x1", "x2", "value"], krows)
        man.add(kpath)
        pstar_rows = [{"n": n, "p_star": tab.p_star(n),
                       "bound_2_over_pi_n": walks.p_star_bound(n)}
                      for n in range(1, tab.n_max + 1)]
        ppath = os.path.join(out, "p_star.csv")
        reporting.write_csv(ppath, ["n", "p_star", "bound_2_over_pi_n"], pstar_rows)
        man.add(ppath)
    if args.sigma2 is not None:
        n_max = args.n_max or 256
        kern = walks.build_collision_kernel(n_max, sigma2=args.sigma2,
                                            z_max_n=args.z_max_n)
        upath = os.path.join(out, "collision_kernel.csv")
        reporting.write_csv(upath, ["n", "U"],
                            [{"n": n, "U": float(kern.U[n])}
                             for n in range(n_max + 1)])
        man.add(upath)
        if args.z_max_n:
            zrows = []
            for n in range(args.z_max_n + 1):
                for z, val in sorted(kern.Uz_map(n).items()):
                    zrows.append({"n": n, "z1": z[0], "z2": z[1], "value": val})
            zpath = os.path.join(out, "collision_kernel_z.csv")
            reporting.write_csv(zpath, ["n", "z1", "z2", "value"], zrows)
            man.add(zpath)
        if args.emit_plot_data:
            spath = os.path.join(out, "collision_kernel_series.csv")
            reporting.write_series(spath, range(n_max + 1), kern.U)
            man.add(spath)
        _maybe_figure(args, man, os.path.join(out, "collision_kernel.png"),
                      lambda ax: (ax.semilogy(kern.U[1:], lw=1),
                                  ax.set_xlabel("n"),
                                  ax.set_ylabel("U(n)")))
    if rows:
        spath = os.path.join(out, "kernel_scalars.csv")
        reporting.write_csv(spath, ["name", "value", "scale"], rows)
        man.add(spath)
    man.write(os.path.join(out, "manifest.json"))
    return 0


def cmd_moment_exact(args) -> int:
    out = _outdir(args)
    law = _law(args)
    if args.sigma2 is not None:
        target = math.log1p(args.sigma2)
        beta = math.sqrt(target) if law.kind == "gaussian" else \
            schedules._solve_beta(law, args.sigma2)
    else:
        beta = args.beta
    starts = [(0, 0)] * args.q
    rows = []
    methods = args.methods.split(",")
    for m in methods:
        if m == "tm":
            val = moments.moment_exact_tm(args.q, args.s, args.t, starts, law, beta)
        elif m == "paths":
            val = moments.moment_exact_paths(args.q, args.s, args.t, starts, law, beta)
        elif m == "env":
            val = moments.moment_exact_env(args.q, args.s, args.t, starts, law, beta)
        elif m == "phi":
            val = moments.phi_exact(args.q, args.s, args.t, starts,
                                    law.Lambda2(beta))
        else:
            raise PolylabError(f"unknown method {m}")
        rows.append({"method": m, "q": args.q, "s": args.s, "t": args.t,
                     "law": law.kind, "beta": beta, "value": val,
                     "exact": True, "scale": "moment"})
        print(f"E[prod W] ({m}) = {val!r}")
    man = _manifest(args, "moment-exact", {"q": args.q, "s": args.s,
                                           "t": args.t, "law": law.kind,
                                           "beta": beta,
                                           "methods": args.methods})
    path = os.path.join(out, "moment_exact.csv")
    reporting.write_csv(path, ["method", "q", "s", "t", "law", "beta",
                               "value", "exact", "scale"], rows)
    man.add(path)
    man.write(os.path.join(out, "manifest.json"))
    return 0


def cmd_moment_mc(args) -> int:
    out = _outdir(args)
    law = _law(args)
    sched = _schedule(args, args.N)
    est = mc.estimate_moment(args.q, args.N, sched, law, args.samples,
                             args.seed, rfac=args.rfac, threads=args.threads)
    print(f"E[W^{args.q}] ~= {est.mean!r} +- {est.std_error!r} "
          f"(n={est.n_samples}, median logW {est.median_logW!r})")
    man = _manifest(args, "moment-mc", {"q": args.q, "N": args.N,
                                        "schedule": args.schedule,
                                        "beta-hat": args.beta_hat,
                                        "theta": args.theta,
                                        "beta": args.beta,
                                        "law": args.law,
                                        "samples": args.samples,
                                        "rfac": args.rfac})
    path = os.path.join(out, "moment_mc.csv")
    reporting.write_csv(path, ["q", "N", "law", "mean", "std_error",
                               "median_logW", "trimmed_mean", "n_samples",
                               "seed"],
                        [{"q": args.q, "N": args.N, "law": law.kind,
                          "mean": est.mean, "std_error": est.std_error,
                          "median_logW": est.median_logW,
                          "trimmed_mean": est.trimmed_mean,
                          "n_samples": est.n_samples, "seed": est.seed}])
    man.add(path)
    if getattr(args, "dump_logw", False):
        logw = mc.sample_logW(args.N, sched, law, args.samples,
                              args.seed, rfac=args.rfac, threads=args.threads)
        dpath = os.path.join(out, "logw_sample.csv")
        reporting.write_csv(dpath, ["sample", "log_W"],
                            [{"sample": i, "log_W": float(v)}
                             for i, v in enumerate(logw)])
        man.add(dpath)
    man.write(os.path.join(out, "manifest.json"))
    return 0


def cmd_expansion(args) -> int:
    out = _outdir(args)
    L2 = math.log1p(args.sigma2)
    starts = [(0, 0)] * args.q
    rows = []
    for p0 in args.p0:
        p0v = diagrams.INF if p0 in ("inf", "none") else int(p0)
        val = expansion.truncated_expansion(args.q, args.s, args.t, starts,
                                            L2, p0v)
        rows.append({"p0": p0, "value": val, "scale": "moment"})
        print(f"Phi^<= {p0}  = {val!r}")
    phi = moments.phi_exact(args.q, args.s, args.t, starts, L2)
    rows.append({"p0": "exact", "value": phi, "scale": "moment"})
    print(f"Phi (exact) = {phi!r}")
    man = _manifest(args, "expansion", {"q": args.q, "s": args.s, "t": args.t,
                                        "sigma2": args.sigma2,
                                        "p0": list(args.p0)})
    path = os.path.join(out, "expansion.csv")
    reporting.write_csv(path, ["p0", "value", "scale"], rows)
    man.add(path)
    man.write(os.path.join(out, "manifest.json"))
    return 0


def cmd_diagrams(args) -> int:
    out = _outdir(args)
    p0v = diagrams.INF if args.p0 in ("inf", "none") else int(args.p0)
    objs = []
    for d in diagrams.enumerate_diagrams(args.m, args.q, p0v):
        cls = diagrams.classify(d, args.L, args.L0)
        c_rows = diagrams.c_coeffs_from_gamma(cls.gamma)
        objs.append({"J": [sorted(map(list, Jr)) for Jr in d.J],
                     "classification": cls.summary(),
                     "c_final": c_rows[-1]})
    path = os.path.join(out, "diagrams.jsonl")
    reporting.write_jsonl(path, objs)
    print(f"{len(objs)} diagrams in D({args.m}, {args.q}, {args.p0}) "
          f"-> {path}")
    man = _manifest(args, "diagrams", {"m": args.m, "q": args.q,
                                       "p0": args.p0, "L": args.L,
                                       "L0": args.L0})
    man.add(path)
    man.write(os.path.join(out, "manifest.json"))
    return 0


def _verdict_rows_appendix(args):
    rows = []
    sigma2 = 0.3
    rep = bounds.second_moment_bound_report(256, sigma2)
    dp = walks.two_walk_mgf_dp(48, math.log1p(sigma2))
    kern = walks.build_collision_kernel(48, sigma2=sigma2)
    rows.append({"check": "renewal_equality_m48",
                 "lhs": float(kern.U.sum()), "rhs": dp,
                 "holds": abs(kern.U.sum() - dp) < 1e-10 * dp})
    rows.append({"check": "second_moment_bound_m256", "lhs": rep.lhs,
                 "rhs": rep.rhs, "holds": rep.holds})
    ns = [1, 2, 3, 5, 10, 100, 1000, 10000]
    worst = max(walks.p_star(n) / walks.p_star_bound(n) for n in ns)
    rows.append({"check": "p_star_bound", "lhs": worst, "rhs": 1.0,
                 "holds": worst <= 1.0})
    for (q, p, n) in [(2, 1, 1), (3, 1, 3), (3, 2, 2), (3, 2, 6)]:
        r = bounds.check_collision_event_bound(q, p, n)
        rows.append({"check": f"collision_event_q{q}_p{p}_n{n}",
                     "lhs": r.lhs, "rhs": r.rhs, "holds": r.holds})
    c_emp = laws.lambda_ratio_constant(laws.rademacher())
    rows.append({"check": "lambda_ratio_rademacher", "lhs": c_emp,
                 "rhs": 5.0, "holds": c_emp <= 5.0})
    dc = schedules.derive_constants(
        schedules.Subcritical(presets.KEY_LEMMA_SUBCRITICAL["beta_hat"],
                              presets.KEY_LEMMA_SUBCRITICAL["n_max"]),
        laws.gaussian())
    kern = walks.build_collision_kernel(presets.KEY_LEMMA_SUBCRITICAL["n_max"],
                                        sigma2=dc.sigma2)
    wg = [2.0 ** k for k in range(0, 13)]
    kl = walks.collision_smoothing_ratio(kern.U, dc.sigma2_bar, wg)
    rows.append({"check": "collision_smoothing_max_ratio", "lhs": kl["max_ratio"],
                 "rhs": 1.5, "holds": kl["max_ratio"] <= 1.5})
    return rows


def _verdict_rows_induction(args):
    rows = []
    grid = 0
    for j in range(0, 5):
        for t in (100, 1000, 10000):
            for s2b in (0.02, 0.05):
                if s2b * math.log(t) >= 0.95:
                    continue
                for v in (1, 2, 5, max(2, t // 100), t // 10, t // 2, t):
                    rs = induction.check_sum_inequalities(j, int(v), t, s2b)
                    ri = induction.check_integral_inequalities(j, float(v), t, s2b)
                    grid += 1
                    for name, rr in {**rs, **ri}.items():
                        if not rr["ok"]:
                            rows.append({"check": f"{name}_j{j}_v{v}_t{t}",
                                         "lhs": rr["lhs"], "rhs": rr["rhs"],
                                         "holds": False})
    rows.append({"check": f"induction_grid_{grid}_points", "lhs": 0.0,
                 "rhs": 0.0, "holds": True})
    return rows


def _verdict_rows_counting(args):
    from .verify_combinatorics import full_combinatorial_report
    rep = full_combinatorial_report(m_max=5, q=3, L_values=(2, 3),
                                    deltas=(0.1, 1.0))
    rows = [{"check": k, "lhs": v.get("worst", 0.0), "rhs": v.get("bound", 0.0),
             "holds": v["holds"]} for k, v in rep.items()]
    return rows


def cmd_verify(args) -> int:
    out = _outdir(args)
    suites = {"appendix": _verdict_rows_appendix,
              "induction": _verdict_rows_induction,
              "counting": _verdict_rows_counting}
    names = list(suites) if args.suite == "all" else [args.suite]
    rows = []
    for nm in names:
        rows.extend(suites[nm](args))
    all_ok = all(r["holds"] for r in rows)
    width = max(len(r["check"]) for r in rows)
    for r in rows:
        status = "PASS" if r["holds"] else "FAIL"
        print(f"{r['check']:<{width}}  {status}  "
              f"lhs={r['lhs']:.6g} rhs={r['rhs']:.6g}")
    print(f"verdict: {'ALL PASS' if all_ok else 'FAILURES PRESENT'}")
    man = _manifest(args, "verify", {"suite": args.suite})
    path = os.path.join(out, "verify.csv")
    reporting.write_csv(path, ["check", "lhs", "rhs", "holds"], rows)
    man.add(path)
    _maybe_figure(args, man, os.path.join(out, "verify_margins.png"),
                  lambda ax: _plot_verify(ax, rows))
    man.write(os.path.join(out, "manifest.json"))
    if args.assert_mode and not all_ok:
        return 1
    return 0


def _plot_verify(ax, rows):
    import numpy as _np
    named = [(r["check"], r["lhs"] / r["rhs"]) for r in rows if r["rhs"]]
    if not named:
        return
    ys = _np.arange(len(named))
    ax.barh(ys, [v for _, v in named], color="#4878d0")
    ax.axvline(1.0, color="k", ls="--", lw=1)
    ax.set_yticks(ys, [n for n, _ in named], fontsize=7)
    ax.set_xlabel("lhs / rhs (must stay left of 1)")


def cmd_tail(args) -> int:
    out = _outdir(args)
    law = _law(args)
    sched = _schedule(args, args.N)
    xg = [float(x) for x in args.x_grid.split(",")]
    tails = mc.estimate_tail(args.N, sched, law, xg, args.samples, args.seed,
                             rfac=args.rfac, threads=args.threads)
    rep = bounds.ld_rate_report(tails,
                                one_sided=isinstance(sched, schedules.QuasiCritical))
    for te in tails:
        print(f"x={te.x:<5} p_hat={te.p_hat!r} exceed={te.n_exceed} "
              f"rate={te.rate if te.rate is not None else 'n/a'} "
              f"{'(window)' if te.in_window else '(outside window)'}")
    print(f"headline rate: {rep['headline_rate']} at x={rep['headline_x']} "
          f"(limit 0.5)")
    man = _manifest(args, "tail", {"N": args.N, "schedule": args.schedule,
                                   "beta-hat": args.beta_hat,
                                   "theta": args.theta, "beta": args.beta,
                                   "law": args.law, "samples": args.samples,
                                   "x-grid": ",".join(str(v) for v in xg),
                                   "rfac": args.rfac})
    path = os.path.join(out, "tail.csv")
    reporting.write_csv(path, ["x", "threshold", "p_hat", "ci_low", "ci_high",
                               "rate", "rate_is_lower_bound", "n_exceed",
                               "n_samples", "in_window"], tails)
    man.add(path)
    rpath = os.path.join(out, "tail_rates.json")
    reporting.write_json(rpath, rep)
    man.add(rpath)
    if args.emit_plot_data:
        xs = [te.x for te in tails if te.rate is not None]
        rs = [te.rate for te in tails if te.rate is not None]
        spath = os.path.join(out, "tail_rate_series.csv")
        reporting.write_series(spath, xs, rs, labels=("x", "rate"))
        man.add(spath)
    _maybe_figure(args, man, os.path.join(out, "tail_rates.png"),
                  lambda ax: (_plot_rates(ax, tails)))
    man.write(os.path.join(out, "manifest.json"))
    return 0


def _plot_rates(ax, tails):
    xs = [te.x for te in tails if te.rate is not None]
    rs = [te.rate for te in tails if te.rate is not None]
    ax.plot(xs, rs, "o-", label="-log p / x^2")
    ax.axhline(0.5, ls="--", c="k", label="limit 1/2")
    ax.set_xlabel("x")
    ax.set_ylabel("implied rate")
    ax.legend()


def cmd_clt(args) -> int:
    out = _outdir(args)
    law = _law(args)
    sched = schedules.Subcritical(args.beta_hat, args.N)
    ks, lam2 = mc.clt_diagnostic(args.N, sched, law, args.samples, args.seed,
                                 rfac=args.rfac, threads=args.threads)
    print(f"KS distance = {ks!r} against Normal(-{lam2/2!r}, {lam2!r}) "
          f"[lambda^2 = log(1/(1-beta_hat^2))]")
    man = _manifest(args, "clt", {"N": args.N, "beta_hat": args.beta_hat,
                                  "law": law.kind, "samples": args.samples,
                                  "rfac": args.rfac})
    path = os.path.join(out, "clt.csv")
    reporting.write_csv(path, ["N", "beta_hat", "law", "n_samples", "ks_stat",
                               "lambda2", "seed"],
                        [{"N": args.N, "beta_hat": args.beta_hat,
                          "law": law.kind, "n_samples": args.samples,
                          "ks_stat": ks, "lambda2": lam2, "seed": args.seed}])
    man.add(path)
    if args.emit_plot_data or args.figures:
        logw = mc.sample_logW(args.N, sched, law, min(args.samples, 4000),
                              args.seed, rfac=args.rfac, threads=args.threads)
        hist, edges = np.histogram(logw, bins=60, density=True)
        mids = 0.5 * (edges[1:] + edges[:-1])
        if args.emit_plot_data:
            spath = os.path.join(out, "clt_hist_series.csv")
            reporting.write_series(spath, mids, hist,
                                   labels=("log_W", "density"))
            man.add(spath)
        def plot(ax):
            from scipy.stats import norm as _norm
            ax.bar(mids, hist, width=mids[1] - mids[0], alpha=0.5,
                   label="log W sample")
            xs = np.linspace(mids[0], mids[-1], 300)
            ax.plot(xs, _norm(-lam2 / 2, math.sqrt(lam2)).pdf(xs), "r-",
                    label="Normal(-l2/2, l2)")
            ax.set_xlabel("log W")
            ax.legend()
        _maybe_figure(args, man, os.path.join(out, "clt_hist.png"), plot)
    if getattr(args, "dump_logw", False):
        logw = mc.sample_logW(args.N, sched, law, args.samples, args.seed,
                              rfac=args.rfac, threads=args.threads)
        dpath = os.path.join(out, "logw_sample.csv")
        reporting.write_csv(dpath, ["sample", "log_W"],
                            [{"sample": i, "log_W": float(v)}
                             for i, v in enumerate(logw)])
        man.add(dpath)
    man.write(os.path.join(out, "manifest.json"))
    return 0


def cmd_replay(args) -> int:
    with open(args.manifest) as fh:
        man = json.load(fh)
    cmd = man["command"]
    params = man["params"]
    out = args.out
    argv = [cmd, "--out", out, "--seed", str(man["seed"])]
    if args.threads:
        argv += ["--threads", str(args.threads)]
    for key, val in params.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(val, (list, tuple)):
            argv += [flag, ",".join(str(v) for v in val)]
        elif val is not None:
            argv += [flag, str(val)]
    rc = main(argv)
    if rc != 0:
        return rc
    with open(os.path.join(out, "manifest.json")) as fh:
        new = json.load(fh)
    ok = True
    for name, digest in man["outputs"].items():
        got = new["outputs"].get(name)
        status = "match" if got == digest else "MISMATCH"
        ok &= got == digest
        print(f"{name}: {status}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------

def _add_common(sp, mc_flags=False):
    sp.add_argument("--out", default="polylab-out")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--config", default=None)
    sp.add_argument("--assert", dest="assert_mode", action="store_true")
    sp.add_argument("--report", dest="assert_mode", action="store_false")
    sp.add_argument("--emit-plot-data", action="store_true")
    sp.add_argument("--figures", action="store_true")
    sp.set_defaults(assert_mode=True)
    if mc_flags:
        sp.add_argument("--dump-logw", action="store_true",
                        help="also write the raw log W sample")
        sp.add_argument("--law", default="gaussian")
        sp.add_argument("--law-table", default=None,
                        help='JSON {"values": [...], "probs": [...]}')
        sp.add_argument("--schedule", default="subcritical")
        sp.add_argument("--beta-hat", type=float, default=0.5)
        sp.add_argument("--theta", type=float, default=None)
        sp.add_argument("--theta-exponent", type=float, default=0.5)
        sp.add_argument("--beta", type=float, default=None)
        sp.add_argument("--rfac", type=float, default=4.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polylab",
                                 description="2D directed-polymer laboratory")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("kernel", help="heat kernels, R_N, collision kernel")
    sp.add_argument("--n-max", type=int, default=0)
    sp.add_argument("--RN", type=int, default=0)
    sp.add_argument("--sigma2", type=float, default=None)
    sp.add_argument("--z-max-n", type=int, default=0)
    _add_common(sp)
    sp.set_defaults(fn=cmd_kernel)

    sp = sub.add_parser("moment-exact", help="exact mixed moments")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--s", type=int, default=1)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--law", default="gaussian")
    sp.add_argument("--law-table", default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--sigma2", type=float, default=None)
    sp.add_argument("--methods", default="tm")
    _add_common(sp)
    sp.set_defaults(fn=cmd_moment_exact)

    sp = sub.add_parser("moment-mc", help="Monte Carlo moments")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--samples", type=int, default=1000)
    _add_common(sp, mc_flags=True)
    sp.set_defaults(fn=cmd_moment_mc)

    sp = sub.add_parser("expansion", help="truncated diagram sums")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--s", type=int, default=1)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--sigma2", type=float, required=True)
    sp.add_argument("--p0", nargs="+", default=["2", "3", "inf"])
    _add_common(sp)
    sp.set_defaults(fn=cmd_expansion)

    sp = sub.add_parser("diagrams", help="enumerate/classify diagrams")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--p0", default="2")
    sp.add_argument("--L", type=int, default=2)
    sp.add_argument("--L0", type=int, default=3)
    _add_common(sp)
    sp.set_defaults(fn=cmd_diagrams)

    sp = sub.add_parser("verify", help="bound/inequality verification suites")
    sp.add_argument("--suite", default="all",
                    choices=["appendix", "induction", "counting", "all"])
    _add_common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("tail", help="tail exceedance estimates")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--x-grid", default="0,0.5,1,1.5,2,2.5,3")
    _add_common(sp, mc_flags=True)
    sp.set_defaults(fn=cmd_tail)

    sp = sub.add_parser("clt", help="KS diagnostic against the log-normal limit")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--beta-hat", type=float, default=0.5)
    sp.add_argument("--law", default="rademacher")
    sp.add_argument("--law-table", default=None)
    sp.add_argument("--rfac", type=float, default=3.5)
    sp.add_argument("--dump-logw", action="store_true")
    _add_common(sp)
    sp.set_defaults(fn=cmd_clt)

    sp = sub.add_parser("replay", help="re-run a manifest, verify hashes")
    sp.add_argument("manifest")
    sp.add_argument("--out", default="polylab-replay")
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(fn=cmd_replay)
    return ap


def _apply_config(args) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    cfg = load_config(path)
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and f"--{key}" not in sys.argv:
            cur = getattr(args, attr)
            if isinstance(cur, bool):
                setattr(args, attr, val.lower() in ("1", "true", "yes"))
            elif isinstance(cur, int):
                setattr(args, attr, int(val))
            elif isinstance(cur, float):
                setattr(args, attr, float(val))
            elif cur is None:
                for conv in (int, float):
                    try:
                        setattr(args, attr, conv(val))
                        break
                    except ValueError:
                        continue
                else:
                    setattr(args, attr, val)
            else:
                setattr(args, attr, val)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    _apply_config(args)
    try:
        return args.fn(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2
    except GateError as exc:
        print(f"gate failure: {exc}", file=sys.stderr)
        return 1
    except PolylabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
