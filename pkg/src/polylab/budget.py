"""Memory budget guard.

POLYLAB_BUDGET_MB caps the size of any single dense allocation; the default
is generous but finite so runaway parameter choices fail fast with
CapacityError instead of thrashing the machine.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import CapacityError

DEFAULT_BUDGET_MB = 2048


def budget_mb() -> float:
    raw = os.environ.get("POLYLAB_BUDGET_MB", "")
    try:
        return float(raw) if raw else DEFAULT_BUDGET_MB
    except ValueError:
        return DEFAULT_BUDGET_MB


def check_array_budget(shape, dtype=np.float64, what: str = "array") -> None:
    cells = math.prod(int(s) for s in shape)
    mb = cells * np.dtype(dtype).itemsize / 2**20
    if mb > budget_mb():
        raise CapacityError(
            f"{what} of shape {tuple(shape)} needs {mb:.0f} MB "
            f"(budget {budget_mb():.0f} MB; set POLYLAB_BUDGET_MB to raise)")
