"""Exact mixed moments E[prod_i W_{s,t}(x_i)] by three independent routes.

* ``moment_exact_tm``   — joint transfer-matrix DP over the q-walk state,
  weighting each time slice by exp(sum_x Lambda_{N(x)}(beta));
* ``moment_exact_paths`` — brute-force enumeration of all q-tuples of paths;
* ``moment_exact_env``  — for discrete laws, exhaustive enumeration of the
  disorder itself, averaging prod_i W_i computed by the polymer DP.  This
  one validates the collision representation instead of assuming it.

``phi_exact`` evaluates the pair-interaction functional E[e^{L2 psi*}],
which coincides with the Gaussian moment at L2 = beta^2.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .budget import check_array_budget
from .errors import CapacityError, DomainError
from .laws import WeightLaw
from . import polymer, slabs

__all__ = [
    "JointDP", "moment_exact_tm", "moment_exact_paths", "moment_exact_env",
    "phi_exact",
]

_MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _shifted(a: np.ndarray, axis: int, d: int) -> np.ndarray:
    out = np.zeros_like(a)
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if d == 1:
        dst[axis], src[axis] = slice(1, None), slice(0, -1)
    else:
        dst[axis], src[axis] = slice(0, -1), slice(1, None)
    out[tuple(dst)] = a[tuple(src)]
    return out


class JointDP:
    """Dense joint distribution of q independent SRWs.

    State axes: (x^1, y^1, ..., x^q, y^q), each of length 2*horizon+1,
    recentered at the walk's own start.  Pair-equality indicators are kept
    as broadcastable arrays so per-slice weights stay cheap to apply.
    """

    def __init__(self, starts, horizon: int):
        self.q = len(starts)
        self.h = int(horizon)
        if self.q > 4:
            raise CapacityError("joint DP limited to q <= 4 walks")
        side = 2 * self.h + 1
        check_array_budget((side,) * (2 * self.q), what="joint walk state")
        self.side = side
        self.starts = [tuple(map(int, s)) for s in starts]
        self.mass = np.zeros((side,) * (2 * self.q))
        self.mass[(self.h,) * (2 * self.q)] = 1.0
        ax = np.arange(-self.h, self.h + 1)
        self._eq = {}
        for i in range(self.q):
            for j in range(i + 1, self.q):
                ex = np.equal.outer(ax + self.starts[i][0], ax + self.starts[j][0])
                ey = np.equal.outer(ax + self.starts[i][1], ax + self.starts[j][1])
                shx = [1] * (2 * self.q)
                shx[2 * i], shx[2 * j] = side, side
                shy = [1] * (2 * self.q)
                shy[2 * i + 1], shy[2 * j + 1] = side, side
                self._eq[(i, j)] = (ex.astype(np.float64).reshape(shx)
                                    * ey.astype(np.float64).reshape(shy))

    def pair_eq(self, i, j) -> np.ndarray:
        return self._eq[(min(i, j), max(i, j))]

    def pair_count(self, subset=None) -> np.ndarray:
        """Broadcastable count of coinciding pairs (within ``subset``)."""
        total = 0.0
        for (i, j), e in self._eq.items():
            if subset is None or (i in subset and j in subset):
                total = total + e
        return np.asarray(total)

    def step(self) -> None:
        m = self.mass
        for w in range(self.q):
            m = 0.25 * (_shifted(m, 2 * w, 1) + _shifted(m, 2 * w, -1)
                        + _shifted(m, 2 * w + 1, 1) + _shifted(m, 2 * w + 1, -1))
        self.mass = m

    def apply(self, weight) -> None:
        self.mass = self.mass * weight

    def total(self) -> float:
        return float(self.mass.sum())


def _multiplicity_weight(dp: JointDP, law: WeightLaw, beta: float):
    """exp(sum_x Lambda_{N(x)}(beta)) as a broadcastable array.

    Position equality is transitive, so for q <= 4 the pair-coincidence
    count determines the multiplicity profile: 0..2 pairs -> that many
    disjoint couples, 3 -> a triple, 6 -> a quadruple.
    """
    q = dp.q
    L = {p: law.Lambda_p(p, beta) for p in range(2, q + 1)}
    if q == 1:
        return 1.0
    cnt = dp.pair_count()
    if q == 2:
        return 1.0 + math.expm1(L[2]) * cnt
    if q == 3:
        triple = dp.pair_eq(0, 1) * dp.pair_eq(0, 2)
        return np.where(triple > 0, math.exp(L[3]), np.exp(L[2] * cnt))
    out = np.exp(L[2] * np.minimum(cnt, 2.0))
    out = np.where(cnt == 3, math.exp(L[3]), out)
    out = np.where(cnt == 6, math.exp(L[4]), out)
    return out


def _run_joint(q, s, t, starts, weight_of):
    if not (1 <= s <= t):
        raise DomainError("need 1 <= s <= t")
    if len(starts) != q:
        raise DomainError("len(starts) must equal q")
    dp = JointDP(starts, horizon=t - s + 1)
    for _ in range(s, t + 1):
        dp.step()
        dp.apply(weight_of(dp))
    return dp.total()


def moment_exact_tm(q, s, t, starts, law: WeightLaw, beta: float) -> float:
    """E[prod_i W_{s,t}(x_i, beta)] by the q-walk collision representation."""
    if q == 1:
        return 1.0
    return _run_joint(q, s, t, starts,
                      lambda dp: _multiplicity_weight(dp, law, beta))


def phi_exact(q, s, t, starts, Lambda2: float) -> float:
    """E_X[e^{Lambda2 * psi*_{s,t,q}}]: pair interactions only."""
    if q == 1:
        return 1.0
    return _run_joint(q, s, t, starts,
                      lambda dp: np.exp(Lambda2 * dp.pair_count()))


# ---------------------------------------------------------------------------
# path-enumeration oracle

def _single_walk_paths(span: int):
    """All 4^span paths as integer position codes per time step."""
    paths = []
    for seq in product(range(4), repeat=span):
        pos = [(0, 0)]
        for mv in seq:
            dx, dy = _MOVES[mv]
            pos.append((pos[-1][0] + dx, pos[-1][1] + dy))
        paths.append(pos[1:])
    return paths


def moment_exact_paths(q, s, t, starts, law: WeightLaw, beta: float) -> float:
    """Brute force over all q-tuples of nearest-neighbour paths."""
    span = t - s + 1
    if 4.0 ** (q * span) > 1e7:
        raise CapacityError("path enumeration beyond 1e7 tuples")
    if q == 1:
        return 1.0
    paths = _single_walk_paths(span)
    npth = len(paths)
    starts = [tuple(map(int, x)) for x in starts]
    # absolute positions encoded as single ints per (path, time)
    code = np.empty((q, npth, span), dtype=np.int64)
    for w in range(q):
        for k, pos in enumerate(paths):
            for n, (x, y) in enumerate(pos):
                code[w, k, n] = (x + starts[w][0]) * 100003 + (y + starts[w][1])
    L = {p: law.Lambda_p(p, beta) for p in range(2, q + 1)}
    prob = 4.0 ** (-q * span)
    total = 0.0
    if q == 2:
        eq = (code[0][:, None, :] == code[1][None, :, :]).sum(axis=2)
        total = float(np.exp(L[2] * eq).sum())
    elif q == 3:
        # bitmask per pair over the span, then per-tuple popcount arithmetic
        weights2 = 2 ** np.arange(span, dtype=np.int64)
        def masks(a, b):
            return ((code[a][:, None, :] == code[b][None, :, :])
                    * weights2).sum(axis=2)
        m01, m02, m12 = masks(0, 1), masks(0, 2), masks(1, 2)
        pc = np.zeros(1 << span, dtype=np.int64)
        for v in range(1 << span):
            pc[v] = bin(v).count("1")
        for a in range(npth):
            row01 = m01[a]
            row02 = m02[a]
            tri = pc[row01[:, None] & row02[None, :]]
            psum = (pc[row01][:, None] + pc[row02][None, :] + pc[m12])
            total += float(np.exp(L[2] * (psum - 3 * tri) + L[3] * tri).sum())
    else:
        for tup in product(range(npth), repeat=q):
            acc = 0.0
            for n in range(span):
                seen = {}
                for w in range(q):
                    c = code[w, tup[w], n]
                    seen[c] = seen.get(c, 0) + 1
                for c, k in seen.items():
                    if k >= 2:
                        acc += L[k]
            total += math.exp(acc)
    return prob * total


# ---------------------------------------------------------------------------
# environment-enumeration oracle

def moment_exact_env(q, s, t, starts, law: WeightLaw, beta: float) -> float:
    """Average prod_i W_i over every realization of a discrete environment.

    First-principles check of the collision identity: nothing here knows
    about Lambda_p or walk coincidences.
    """
    if law.kind not in ("rademacher", "discrete"):
        raise DomainError("environment enumeration needs a discrete law")
    if law.kind == "rademacher":
        atoms = np.array([-1.0, 1.0])
        probs = np.array([0.5, 0.5])
    else:
        atoms = np.asarray(law.values)
        probs = np.asarray(law.probs)
    k = len(atoms)
    starts = [tuple(map(int, x)) for x in starts]
    uniq = sorted(set(starts))
    lo = (min(x[0] for x in uniq) - t, min(x[1] for x in uniq) - t)
    hi = (max(x[0] for x in uniq) + t, max(x[1] for x in uniq) + t)
    Wd, Hd = hi[0] - lo[0] + 1, hi[1] - lo[1] + 1

    # list the cone sites, times s..t
    sites = []
    for n in range(s, t + 1):
        m = slabs._cone_mask((Wd, Hd), lo, uniq, n)   # reachable by time n
        for i, j in np.argwhere(m):
            sites.append((n, int(i), int(j)))
    S = len(sites)
    n_env = float(k) ** S
    if n_env > 1e7:
        raise CapacityError(f"{k}^{S} environments exceed the 1e7 cap")
    n_env = int(round(n_env))
    check_array_budget((n_env, Wd, Hd), what="environment batch")

    digits = np.zeros((n_env, S), dtype=np.int8)
    idx = np.arange(n_env)
    for si in range(S):
        digits[:, si] = (idx // (k ** si)) % k
    logp = np.log(probs)[digits].sum(axis=1)

    Lam = law.Lambda(beta)
    omega = np.zeros((n_env, t + 1, Wd, Hd))
    for si, (n, i, j) in enumerate(sites):
        omega[:, n, i, j] = atoms[digits[:, si]]

    prod = np.ones(n_env)
    for x0 in uniq:
        mass = np.zeros((n_env, Wd, Hd))
        mass[:, x0[0] - lo[0], x0[1] - lo[1]] = 1.0
        for n in range(s, t + 1):
            nxt = np.zeros_like(mass)
            nxt[:, 1:, :] += mass[:, :-1, :]
            nxt[:, :-1, :] += mass[:, 1:, :]
            nxt[:, :, 1:] += mass[:, :, :-1]
            nxt[:, :, :-1] += mass[:, :, 1:]
            nxt *= 0.25
            nxt *= np.exp(beta * omega[:, n] - Lam)
            mass = nxt
        W = mass.sum(axis=(1, 2))
        prod *= W ** starts.count(x0)
    return float(np.dot(np.exp(logp), prod))
