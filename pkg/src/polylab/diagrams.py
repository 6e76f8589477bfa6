"""Diagrams of successive particle intersections and their index calculus.

A diagram is a sequence (J_1, ..., J_m) of non-empty pair-sets J_r over the
particles 1..q, subject to the successive non-containment constraint
(the support of J_r never sits inside the support of J_{r-1}), optionally
truncated to supports of at most p0 particles.

The classification below drives two coefficient recursions:

* c_i^k with   c_i^{k+1} = c_i^k + 2 gamma_k sum_{j<i} c_j^k
* a_l^k with   a_l^{k+1} = 2 gamma_k a_{l-1}^k + sum_{j=l}^k a_j^k

where gamma_k flags whether index m-k (resp. m+1-k) is "bad": an index is
bad when it is a small-jump index or a fresh long-jump index; freshness is
decided by stopping indices laid out on an L-grid below each small index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .errors import CapacityError, DomainError

__all__ = [
    "Diagram", "DiagramClassification", "enumerate_diagrams",
    "enumerate_extended_diagrams", "classify", "c_coeffs", "a_coeffs",
    "count_diagrams_by_small",
]

INF = math.inf


def _pairs(q: int):
    return list(combinations(range(1, q + 1), 2))


def _bar(J) -> frozenset:
    out = set()
    for (i, j) in J:
        out.add(i)
        out.add(j)
    return frozenset(out)


@dataclass(frozen=True)
class Diagram:
    """J is a tuple of frozensets of particle pairs (i, j), i < j, 1-based."""

    q: int
    J: tuple

    def __post_init__(self):
        if self.q < 2:
            raise DomainError("q >= 2 required")
        for Jr in self.J:
            if not Jr:
                raise DomainError("every J_r must be non-empty")
            for (i, j) in Jr:
                if not (1 <= i < j <= self.q):
                    raise DomainError(f"bad pair {(i, j)} for q={self.q}")
        bars = self.bars
        for r in range(1, len(bars)):
            if bars[r] <= bars[r - 1]:
                raise DomainError(
                    f"non-containment violated at position {r + 1}")

    @property
    def m(self) -> int:
        return len(self.J)

    @property
    def bars(self) -> list:
        return [_bar(Jr) for Jr in self.J]

    def sizes(self) -> list:
        return [len(Jr) for Jr in self.J]


def make_diagram(q, pair_seq) -> Diagram:
    """Diagram from a sequence of pair collections, e.g. [(1,2), ((1,2),(1,3))]."""
    J = []
    for item in pair_seq:
        if isinstance(item[0], int):
            J.append(frozenset([tuple(item)]))
        else:
            J.append(frozenset(tuple(p) for p in item))
    return Diagram(q=q, J=tuple(J))


def enumerate_diagrams(m: int, q: int, p0=INF, count_cap: int = 2_000_000):
    """Depth-first, duplicate-free enumeration of D(m, q, p0)."""
    if m < 1:
        raise DomainError("m >= 1 required")
    allp = _pairs(q)
    cand = []
    for k in range(1, len(allp) + 1):
        for Jr in combinations(allp, k):
            J = frozenset(Jr)
            b = _bar(J)
            if p0 is not INF and len(b) > p0:
                continue
            cand.append((J, b))
    est = len(cand) ** m
    if est > count_cap:
        raise CapacityError(f"~{est} diagrams exceed the enumeration cap")

    def rec(prefix, prev_bar):
        if len(prefix) == m:
            yield Diagram(q=q, J=tuple(prefix))
            return
        for (J, b) in cand:
            if prev_bar is not None and b <= prev_bar:
                continue
            yield from rec(prefix + [J], b)

    yield from rec([], None)


def enumerate_extended_diagrams(m: int, q: int):
    """D^{>2}(m+1, q): m single pairs (consecutive distinct) then |J| >= 2."""
    allp = _pairs(q)
    multi = []
    for k in range(2, len(allp) + 1):
        for Jr in combinations(allp, k):
            multi.append(frozenset(Jr))

    def rec(prefix):
        if len(prefix) == m:
            for tail in multi:
                yield Diagram(q=q, J=tuple(prefix) + (tail,))
            return
        for p in allp:
            J = frozenset([p])
            if prefix and J == prefix[-1]:
                continue
            yield from rec(prefix + [J])

    if m == 0:
        for tail in multi:
            yield Diagram(q=q, J=(tail,))
    else:
        yield from rec([])


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class DiagramClassification:
    m: int
    L: int
    L0: int
    k_last: list            # k_last[r][i] for r=1..m (dicts keyed by particle)
    jump: list              # jump[r][i]
    i1: list                # per r (1-based lists padded with None at 0)
    i2: list
    istar: list
    long_index: list        # bool per r
    small_index: list
    stopping: set
    fresh: list
    good: list
    bad: list               # indices 0..m, bad[0] = True
    psi: list               # psi[r] for r = 0..m
    epsilon: list           # eps_r flags (|J_r| >= 2 and istar L0-long)
    gamma: list             # gamma[k] for k = 0..m-1
    n_small: int = 0
    n_bad: int = 0

    def summary(self) -> dict:
        return {
            "m": self.m, "L": self.L, "L0": self.L0,
            "n_small": self.n_small, "n_bad": self.n_bad,
            "small": [r for r in range(1, self.m + 1) if self.small_index[r]],
            "stopping": sorted(self.stopping),
            "fresh": [r for r in range(1, self.m + 1) if self.fresh[r]],
            "bad": [r for r in range(0, self.m + 1) if self.bad[r]],
            "gamma": list(self.gamma),
        }


def _argmax_jump(indices, jump_r):
    """Largest jump size; ties resolved toward the smallest particle index."""
    best = None
    for i in sorted(indices):
        if best is None or jump_r[i] > jump_r[best]:
            best = i
    return best


def _cluster_of(J, i):
    """Connected component of particle i in the pair-graph J."""
    adj = {}
    for (a, b) in J:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    seen, stack = {i}, [i]
    while stack:
        x = stack.pop()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def classify(d: Diagram, L: int, L0: int = 3) -> DiagramClassification:
    """Full index classification of a diagram at jump scales L (and L0)."""
    if L < 1:
        raise DomainError("L >= 1 required")
    m = d.m
    bars = d.bars
    k_last = [None] * (m + 1)
    jump = [None] * (m + 1)
    i1 = [None] * (m + 1)
    i2 = [None] * (m + 1)
    istar = [None] * (m + 1)
    long_index = [False] * (m + 1)
    epsilon = [0] * (m + 1)

    def is_long(r, i, scale):
        return k_last[r][i] == 0 or (r - k_last[r][i]) > scale

    for r in range(1, m + 1):
        kl, jp = {}, {}
        for i in bars[r - 1]:
            k = 0
            for rr in range(r - 1, 0, -1):
                if i in bars[rr - 1]:
                    k = rr
                    break
            kl[i] = k
            jp[i] = r - k
        k_last[r], jump[r] = kl, jp
        i1[r] = _argmax_jump(bars[r - 1], jp)
        cluster = _cluster_of(d.J[r - 1], i1[r]) - {i1[r]}
        i2[r] = _argmax_jump(cluster, jp)
        if len(d.J[r - 1]) >= 2:
            rest = set(bars[r - 1]) - {i1[r], i2[r]}
            istar[r] = _argmax_jump(rest, jp)
            epsilon[r] = int(is_long(r, istar[r], L0))
        long_index[r] = is_long(r, i1[r], L) and is_long(r, i2[r], L)

    small_index = [False] * (m + 1)
    for r in range(1, m + 1):
        small_index[r] = not long_index[r]

    smalls = [r for r in range(1, m + 1) if small_index[r]]
    s_list = [0] + smalls + [m + 1]
    stopping = set()
    for l in range(1, len(s_list)):
        lo, hi = s_list[l - 1], s_list[l]
        if hi - lo > L:
            k = 1
            while hi - k * L > lo:
                stopping.add(hi - k * L)
                k += 1

    fresh = [False] * (m + 1)
    for r in range(1, m):
        if long_index[r] and (r in stopping or small_index[r + 1]):
            fresh[r] = True
    if long_index[m]:
        fresh[m] = True

    good = [False] * (m + 1)
    bad = [False] * (m + 1)
    bad[0] = True
    for r in range(1, m + 1):
        good[r] = long_index[r] and not fresh[r]
        bad[r] = not good[r]

    psi = [0] * (m + 1)
    last_bad = 0
    for r in range(1, m + 1):
        if bad[r]:
            last_bad = r
        psi[r] = last_bad

    gamma = [0] * max(m, 1)
    gamma[m - 1] = 1
    for k in range(0, m - 1):
        gamma[k] = int(bad[m - k])

    return DiagramClassification(
        m=m, L=L, L0=L0, k_last=k_last, jump=jump, i1=i1, i2=i2, istar=istar,
        long_index=long_index, small_index=small_index, stopping=stopping,
        fresh=fresh, good=good, bad=bad, psi=psi, epsilon=epsilon,
        gamma=gamma, n_small=sum(small_index[1:]),
        n_bad=sum(gamma))


# ---------------------------------------------------------------------------
# coefficient recursions

def c_coeffs(d: Diagram, L: int, L0: int = 3):
    """Triangular array c_i^k, k = 0..m, from the diagram's gamma vector."""
    cls = classify(d, L, L0)
    return c_coeffs_from_gamma(cls.gamma), cls


def c_coeffs_from_gamma(gamma):
    m = len(gamma)
    rows = [[1]]
    for k in range(m):
        prev = rows[-1]
        cur = []
        for i in range(k + 2):
            ci = prev[i] if i < len(prev) else 0
            if gamma[k]:
                ci += 2 * sum(prev[j] for j in range(min(i, len(prev))))
            cur.append(ci)
        rows.append(cur)
    return rows


def a_coeffs(d: Diagram, L: int, L0: int = 3):
    """Array a_l^k for an extended diagram (last block with |J| >= 2).

    The classification runs on all m+1 blocks; gamma_k = 1{m+1-k bad} for
    k < m and gamma_m = 1 by convention.
    """
    cls = classify(d, L, L0)
    mp1 = d.m            # diagram already has m+1 blocks
    gamma = [0] * mp1
    gamma[mp1 - 1] = 1
    for k in range(0, mp1 - 1):
        gamma[k] = int(cls.bad[mp1 - k])
    return a_coeffs_from_gamma(gamma), cls, gamma


def a_coeffs_from_gamma(gamma):
    K = len(gamma)
    rows = [[1]]
    for k in range(K):
        prev = rows[-1]
        cur = []
        for l in range(k + 2):
            v = 2 * gamma[k] * (prev[l - 1] if 0 <= l - 1 < len(prev) else 0)
            v += sum(prev[j] for j in range(l, len(prev)))
            cur.append(v)
        rows.append(cur)
    return rows


def count_diagrams_by_small(m: int, q: int, L: int, L0: int = 3):
    """Exact |D^(n)(m, q)| for the pair-only family, by classification."""
    counts = {}
    for d in enumerate_diagrams(m, q, p0=2):
        n = classify(d, L, L0).n_small
        counts[n] = counts.get(n, 0) + 1
    return counts
