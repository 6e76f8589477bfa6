"""Named parameter presets used by the CLI and the acceptance suite.

The Monte Carlo presets pick the cheapest weight law (Rademacher bits) and
horizon/sample counts sized for a small multicore machine; the statistical
targets they feed are distribution-level, so the law choice is free.
"""

from __future__ import annotations

import math

from . import laws, schedules

CLT_SUBCRITICAL = {
    "N": 4096,
    "beta_hat": 0.5,
    "law": "rademacher",
    "n_samples": 10_000,
    "rfac": 3.5,
    "seed": 20260810,
}

TAIL_SUBCRITICAL = {
    "N": 256,
    "beta_hat": 0.3,
    "law": "rademacher",
    "n_samples": 400_000,
    "x_grid": (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.25, 3.5, 3.75, 4.0),
    "rfac": 4.0,
    "seed": 31,
}

TAIL_QUASICRITICAL = {
    "N": 512,
    "theta_exponent": 0.5,       # theta_N = (log N)^a
    "law": "rademacher",
    "n_samples": 100_000,
    "x_grid": (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0),
    "rfac": 4.0,
    "seed": 37,
}

KEY_LEMMA_SUBCRITICAL = {
    "beta_hat": 0.5,
    "n_max": 10_000,
}


def law_by_name(name: str) -> laws.WeightLaw:
    name = name.lower()
    if name in ("gaussian", "normal"):
        return laws.gaussian()
    if name == "rademacher":
        return laws.rademacher()
    if name in ("uniform", "uniformscaled"):
        return laws.uniform_scaled()
    raise ValueError(f"unknown law {name!r} (discrete tables via --law-table)")


def schedule_from(kind: str, N: int, beta_hat=None, theta=None,
                  theta_exponent=None, beta=None):
    kind = kind.lower()
    if kind in ("subcritical", "sc"):
        return schedules.Subcritical(beta_hat=float(beta_hat), N=N)
    if kind in ("quasicritical", "qc"):
        if theta is None:
            theta = math.log(N) ** float(theta_exponent)
        return schedules.QuasiCritical(theta_N=float(theta), N=N)
    if kind in ("explicit", "beta"):
        return schedules.Explicit(beta=float(beta), N=N)
    raise ValueError(f"unknown schedule kind {kind!r}")
