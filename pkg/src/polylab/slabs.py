"""Sampled disorder fields on the space-time cone reachable by the walks.

A slab holds one i.i.d. realization omega(n, x) for n = 1..t and x in the
union of the walks' parity cones.  Values are a pure function of
(seed, sample, n, x) through the counter-based scheme in ``rng``, so the
same seed reproduces the slab bit-exactly and enlarging the cone never
changes existing values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import ConeError, DomainError
from .budget import check_array_budget
from .laws import WeightLaw

__all__ = ["EnvironmentSlab", "sample_slab"]


@dataclass(frozen=True)
class EnvironmentSlab:
    """Disorder on times 1..t over a bounding box with per-time cone masks."""

    t: int
    starts: tuple
    seed: int
    sample: int
    lo: tuple          # inclusive box corner (x1, x2)
    hi: tuple
    values: np.ndarray  # shape (t+1, W, H); row 0 unused
    mask: np.ndarray    # bool, same shape: populated sites

    def omega(self, n: int, x) -> float:
        i = x[0] - self.lo[0]
        j = x[1] - self.lo[1]
        if n < 1 or n > self.t or not (0 <= i < self.values.shape[1]
                                       and 0 <= j < self.values.shape[2]):
            raise ConeError(f"site ({n}, {tuple(x)}) outside slab")
        if not self.mask[n, i, j]:
            raise ConeError(f"site ({n}, {tuple(x)}) not in the reachable cone")
        return float(self.values[n, i, j])

    def grid(self, n: int) -> np.ndarray:
        """Dense omega row at time n (zeros off-cone)."""
        return self.values[n]


def _cone_mask(shape, lo, starts, n):
    W, H = shape
    x1 = lo[0] + np.arange(W)[:, None]
    x2 = lo[1] + np.arange(H)[None, :]
    m = np.zeros((W, H), dtype=bool)
    for (s1, s2) in starts:
        d = np.abs(x1 - s1) + np.abs(x2 - s2)
        m |= (d <= n) & ((x1 - s1 + x2 - s2 + n) % 2 == 0)
    return m


def export_csv(slab: EnvironmentSlab, path: str) -> str:
    """Dump populated sites as (n, x1, x2, omega) rows for debugging."""
    from .reporting import write_csv

    rows = []
    for n in range(1, slab.t + 1):
        for i, j in np.argwhere(slab.mask[n]):
            rows.append({"n": n, "x1": int(i + slab.lo[0]),
                         "x2": int(j + slab.lo[1]),
                         "omega": float(slab.values[n, i, j])})
    return write_csv(path, ["n", "x1", "x2", "omega"], rows)


def sample_slab(law: WeightLaw, t: int, starts, seed: int,
                sample: int = 0) -> EnvironmentSlab:
    """Draw the disorder over the union cone of ``starts`` up to time t."""
    if t < 1:
        raise DomainError("t >= 1 required")
    starts = tuple((int(a), int(b)) for a, b in starts)
    lo = (min(s[0] for s in starts) - t, min(s[1] for s in starts) - t)
    hi = (max(s[0] for s in starts) + t, max(s[1] for s in starts) + t)
    W, H = hi[0] - lo[0] + 1, hi[1] - lo[1] + 1
    check_array_budget((t + 1, W, H), what="environment slab")
    values = np.zeros((t + 1, W, H))
    mask = np.zeros((t + 1, W, H), dtype=bool)
    root = rng.key_state(seed, sample)
    x1 = lo[0] + np.arange(W)[:, None]
    x2 = lo[1] + np.arange(H)[None, :]
    u = (x1 + x2)
    v = (x1 - x2)
    for n in range(1, t + 1):
        m = _cone_mask((W, H), lo, starts, n)
        mask[n] = m
        values[n][m] = law.sample_sites(root, n, u[m], v[m])
    return EnvironmentSlab(t=t, starts=starts, seed=seed, sample=sample,
                           lo=lo, hi=hi, values=values, mask=mask)
