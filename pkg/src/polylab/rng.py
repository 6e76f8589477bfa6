"""Counter-based random numbers keyed by (seed, sample, time, site).

Every random quantity in polylab is a pure function of integer coordinates,
so sampling is reproducible bit-for-bit regardless of iteration order,
worker count, or chunking.  The mixer is the splitmix64 finalizer; keys are
absorbed one coordinate at a time.

Two derivation schemes exist (both layout-independent):

* ``site_word(seed, sample, n, u, v)``: one 64-bit word per lattice site,
  addressed in rotated coordinates u = x1+x2, v = x1-x2.  Gaussian values
  use two words (streams 0 and 1).
* ``block_word(seed, sample, n, v, block)``: one word per run of 64
  consecutive occupied u-values on a row; single-bit laws (Rademacher)
  read one bit per site from it.  This is the cheap path used by the
  Monte Carlo kernel.

The numpy implementations here and the numba scalar implementations in
``_mckernel`` must stay in lockstep; ``tests/test_rng.py`` pins that.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U53 = float(2.0 ** -53)


def mix64(z):
    """splitmix64 finalizer; accepts uint64 scalar or ndarray (wraps mod 2^64)."""
    z = np.uint64(z) if np.isscalar(z) else z.astype(np.uint64)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= _M1
        z ^= z >> np.uint64(27)
        z *= _M2
        z ^= z >> np.uint64(31)
    return z


def _absorb(state, coord):
    # coord may be negative; two's-complement wrap is intended
    c = np.asarray(coord).astype(np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        key = state ^ (c * GOLDEN + np.uint64(1))
    return mix64(key)


def key_state(seed: int, sample: int) -> np.uint64:
    """Root state for one (seed, sample) stream."""
    s = mix64(np.uint64(np.int64(seed)))
    return _absorb(s, sample)


def site_word(root, n, u, v, stream=0):
    """One uint64 per site (n, u, v); vectorizes over u/v arrays."""
    w = _absorb(root, n)
    w = _absorb(w, u)
    w = _absorb(w, v)
    if stream:
        w = mix64(w ^ GOLDEN)
    return w


def block_word(root, n, v, block):
    """One uint64 per (row v, 64-site block) used for single-bit draws."""
    w = _absorb(root, n)
    w = _absorb(w, v)
    return _absorb(w, np.asarray(block, dtype=np.int64) + (1 << 20))


def word_to_unit(w):
    """Map uint64 to float64 in [0, 1)."""
    return (w >> np.uint64(11)).astype(np.float64) * _U53 if not np.isscalar(w) \
        else float(np.uint64(w) >> np.uint64(11)) * _U53


def word_to_gaussian(w0, w1):
    """Box-Muller from two words; deterministic standard normal."""
    u1 = word_to_unit(w0)
    u2 = word_to_unit(w1)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.cos(2.0 * np.pi * u2)


def bit_for_u(root, n, u, v, parity):
    """Rademacher bit for site (n, u, v): bit of the covering block word.

    ``parity`` is n mod 2; occupied u-values satisfy u = parity (mod 2).
    Sites are packed 64 per block along u with step 2, i.e. block index
    floor((u - parity) / 128), bit index ((u - parity) / 2) mod 64.
    """
    u = np.asarray(u, dtype=np.int64)
    h = (u - parity) >> 1
    blk = h >> 6
    bit = (h & np.int64(63)).astype(np.uint64)
    w = block_word(root, n, v, blk)
    return ((w >> bit) & np.uint64(1)).astype(np.int64)
