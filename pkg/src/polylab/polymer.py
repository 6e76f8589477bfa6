"""Point-to-all partition functions by forward dynamic programming.

    W_{s,t}(x0, beta) = E_{x0}[ exp( sum_{n=s}^{t} (beta omega(n, S_n)
                                                    - Lambda(beta)) ) ]

The walk sits at x0 at time s-1; disorder acts at times s..t inclusive.
Mass is carried on the dense slab box and rescaled into a log accumulator
whenever it drifts out of comfortable float range, so beta may be large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConeError
from .laws import WeightLaw
from .slabs import EnvironmentSlab

__all__ = ["PartitionValue", "partition_function"]

_RESCALE_HI = 1e250
_RESCALE_LO = 1e-250


@dataclass(frozen=True)
class PartitionValue:
    log_W: float

    @property
    def W(self) -> float:
        try:
            return math.exp(self.log_W)
        except OverflowError:
            return math.inf


def partition_function(slab: EnvironmentSlab, x0, s: int, t: int,
                       beta: float, law: WeightLaw) -> PartitionValue:
    """Forward DP for W_{s,t}(x0, beta) on a sampled slab."""
    if not (1 <= s <= t <= slab.t):
        raise ConeError(f"need 1 <= s <= t <= slab horizon {slab.t}")
    x0 = (int(x0[0]), int(x0[1]))
    if x0 not in slab.starts:
        raise ConeError(f"start {x0} was not among the slab's start points")
    if beta == 0.0:
        return PartitionValue(log_W=0.0)

    Lam = law.Lambda(beta)
    Wd, Hd = slab.values.shape[1], slab.values.shape[2]
    mass = np.zeros((Wd, Hd))
    mass[x0[0] - slab.lo[0], x0[1] - slab.lo[1]] = 1.0
    log_acc = 0.0
    for n in range(s, t + 1):
        nxt = np.zeros_like(mass)
        nxt[1:, :] += mass[:-1, :]
        nxt[:-1, :] += mass[1:, :]
        nxt[:, 1:] += mass[:, :-1]
        nxt[:, :-1] += mass[:, 1:]
        nxt *= 0.25
        nxt *= np.exp(beta * slab.values[n] - Lam)
        mass = nxt
        peak = mass.max()
        if peak > _RESCALE_HI or (0.0 < peak < _RESCALE_LO):
            mass /= peak
            log_acc += math.log(peak)
    total = float(mass.sum())
    return PartitionValue(log_W=math.log(total) + log_acc)
