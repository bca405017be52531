"""Numba kernel for one Metropolis walk of the EWD decoder."""

from __future__ import annotations

import numpy as np
from numba import njit

_ZOBRIST: dict[int, np.ndarray] = {}


def zobrist_keys(n: int) -> np.ndarray:
    """Fixed random 64-bit key per (qubit, letter code); identity letters hash to 0."""
    keys = _ZOBRIST.get(n)
    if keys is None:
        rng = np.random.Generator(np.random.Philox(0x5EEDC0DE))
        keys = rng.integers(0, 2**63 - 1, size=(n, 4), dtype=np.int64).astype(np.uint64)
        keys[:, 0] = 0
        _ZOBRIST[n] = keys
    return keys


class ChainSet:
    """Reusable open-addressing table; a slot is live iff its stamp is the current one."""

    def __init__(self, cap: int):
        size = 1
        while size < 2 * cap:
            size <<= 1
        self.keys = np.zeros(size, dtype=np.uint64)
        self.stamps = np.zeros(size, dtype=np.int64)
        self.stamp = 0

    def next_stamp(self) -> int:
        self.stamp += 1
        return self.stamp


@njit(cache=True)
def _log_add(acc_max, acc_sum, lp):
    if lp > acc_max:
        return lp, acc_sum * np.exp(acc_max - lp) + 1.0
    return acc_max, acc_sum + np.exp(lp - acc_max)


@njit(cache=True)
def metropolis_walk(
    gen_q, gen_c, gen_w, start, lp_sample, forbid_sample, lp_phys,
    steps, burn_in, cap, seed, zkeys, table_keys, table_stamps, stamp,
):
    """Walk the stabilizer coset of ``start``; score distinct visited chains.

    Letter codes are x + 2 z. Sampling energy is lexicographic: first the
    number of letters with zero sampling probability, then the finite
    log-probability. Returns (log score, accepted, unique, saturated, final chain).
    """
    np.random.seed(seed)
    n = start.shape[0]
    m = gen_q.shape[0]
    chain = start.copy()
    counts = np.zeros(4, dtype=np.int64)
    h = np.uint64(0)
    for q in range(n):
        counts[chain[q]] += 1
        h ^= zkeys[q, chain[q]]
    mask = table_keys.shape[0] - 1
    acc_max = -np.inf
    acc_sum = 0.0
    accepted = 0
    unique = 0
    saturated = False
    for step in range(steps):
        g = int(np.random.random() * m)
        d_forbid = 0
        d_lp = 0.0
        for k in range(gen_w[g]):
            q = gen_q[g, k]
            old = chain[q]
            new = old ^ gen_c[g, k]
            d_forbid += forbid_sample[new] - forbid_sample[old]
            d_lp += lp_sample[new] - lp_sample[old]
        u = np.random.random()
        if d_forbid < 0:
            take = True
        elif d_forbid > 0:
            take = False
        else:
            take = d_lp >= 0.0 or u < np.exp(d_lp)
        if take:
            accepted += 1
            for k in range(gen_w[g]):
                q = gen_q[g, k]
                old = chain[q]
                new = old ^ gen_c[g, k]
                chain[q] = new
                counts[old] -= 1
                counts[new] += 1
                h ^= zkeys[q, old] ^ zkeys[q, new]
        if step < burn_in or saturated:
            continue
        # a rejected proposal revisits the chain recorded on the previous step
        if not take and step > burn_in:
            continue
        slot = np.int64(h & np.uint64(mask))
        while table_stamps[slot] == stamp and table_keys[slot] != h:
            slot = (slot + 1) & mask
        if table_stamps[slot] == stamp:
            continue
        table_stamps[slot] = stamp
        table_keys[slot] = h
        unique += 1
        if unique >= cap:
            saturated = True
        lp = 0.0
        for c in range(4):
            if counts[c] > 0:
                lp += counts[c] * lp_phys[c]
        if lp > -np.inf:
            acc_max, acc_sum = _log_add(acc_max, acc_sum, lp)
    score = acc_max + np.log(acc_sum) if acc_sum > 0.0 else -np.inf
    return score, accepted, unique, saturated, chain
