"""Vectorized Monte-Carlo kernels.

These reproduce the sequential engines in ``algorithms`` exactly: every
(run, arm) pair reads the same keyed stream, so a batch over runs returns
the same recommendations as looping the one-run functions.  The speedup
comes from rekeying a single counter-based bit generator in place and from
deciding all runs of a round with array operations.

Per-arm pull counts are equal across the surviving arms of a round, which
lets cumulative-average comparisons become integer reward-sum comparisons.
The composite ordering key ``sum * K + (K - 1 - arm)`` realizes the pinned
tie rule (equal sums eliminate the larger index first) as a strict total
order, so partial sorts need no tie handling.
"""

from __future__ import annotations

import numpy as np

from .env import ARM_STRIDE, _U64, BanditEnv
from .schedule import EliminationSchedule
from .algorithms import seq_halve_plan

_DEAD = np.int64(1) << 62


class _StreamBank:
    """One reusable Philox generator, rekeyed per (run, arm)."""

    def __init__(self, seed: int):
        self.seed = seed & _U64
        self._bitgen = np.random.Philox(key=[0, 0])
        self._gen = np.random.Generator(self._bitgen)
        self._state = self._bitgen.state

    def fill(self, run: int, arm: int, out: np.ndarray) -> None:
        st = self._state
        st["state"]["counter"][:] = 0
        st["state"]["key"][0] = self.seed
        st["state"]["key"][1] = (run * ARM_STRIDE + arm) & _U64
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        self._bitgen.state = st
        self._gen.random(out=out)


def _chunks(start: int, count: int, size: int):
    for lo in range(start, start + count, size):
        yield lo, min(size, start + count - lo)


def batch_elimination(
    env: BanditEnv,
    sched: EliminationSchedule,
    seed: int,
    num_runs: int,
    run_start: int = 0,
) -> np.ndarray:
    """Recommendations of ``run_general_elimination`` for runs run_start.. ."""
    K, R = sched.K, sched.R
    n = np.asarray(sched.n, dtype=np.int64)
    if n[0] < 1:
        raise ValueError("batch kernel requires at least one pull in round 1")
    means = np.asarray(env.means)
    bank = _StreamBank(seed)
    n_last = int(n[-1])
    chunk = int(max(16, min(65536, 24_000_000 // max(K * R * 8, n_last * 8, 1))))
    recs = np.empty(num_runs, dtype=np.int64)
    rank_bonus = (K - 1 - np.arange(K)).astype(np.int64)

    for lo, size in _chunks(run_start, num_runs, chunk):
        buf = np.empty((size, n_last), dtype=np.float64)
        S = np.empty((size, K, R), dtype=np.int64)
        for arm in range(K):
            for i in range(size):
                bank.fill(lo + i, arm, buf[i])
            hits = buf < means[arm]
            csum = np.cumsum(hits, axis=1, dtype=np.int64)
            S[:, arm, :] = csum[:, n - 1]
        alive = np.ones((size, K), dtype=bool)
        rows = np.arange(size)
        for r in range(R):
            key = S[:, :, r] * K + rank_bonus
            key[~alive] = _DEAD
            b_r = sched.spec.b[r]
            worst = np.argpartition(key, b_r - 1, axis=1)[:, :b_r]
            alive[rows[:, None], worst] = False
        recs[lo - run_start : lo - run_start + size] = np.argmax(alive, axis=1)
    return recs


def batch_seq_halve(
    env: BanditEnv, T: int, seed: int, num_runs: int, run_start: int = 0
) -> np.ndarray:
    """Recommendations of ``run_seq_halve`` for runs run_start.. ."""
    K = env.K
    R, sizes, pulls = seq_halve_plan(K, T)
    cum = np.cumsum(pulls)
    n_last = int(cum[-1])
    means = np.asarray(env.means)
    bank = _StreamBank(seed)
    chunk = int(max(16, min(65536, 24_000_000 // max(K * R * 8, n_last * 8, 1))))
    recs = np.empty(num_runs, dtype=np.int64)
    rank_bonus = (K - 1 - np.arange(K)).astype(np.int64)

    for lo, size in _chunks(run_start, num_runs, chunk):
        buf = np.empty((size, n_last), dtype=np.float64)
        inc = np.empty((size, K, R), dtype=np.int64)
        for arm in range(K):
            for i in range(size):
                bank.fill(lo + i, arm, buf[i])
            hits = buf < means[arm]
            csum = np.cumsum(hits, axis=1, dtype=np.int64)
            at = csum[:, cum - 1]
            inc[:, arm, 0] = at[:, 0]
            inc[:, arm, 1:] = at[:, 1:] - at[:, :-1]
        alive = np.ones((size, K), dtype=bool)
        rows = np.arange(size)
        for r in range(R):
            g = sizes[r]
            drop = g - (g + 1) // 2
            if drop == 0:
                continue
            key = inc[:, :, r] * K + rank_bonus
            key[~alive] = _DEAD
            worst = np.argpartition(key, drop - 1, axis=1)[:, :drop]
            alive[rows[:, None], worst] = False
        recs[lo - run_start : lo - run_start + size] = np.argmax(alive, axis=1)
    return recs


def batch_ucb_e(
    env: BanditEnv, T: int, a: float, seed: int, num_runs: int, run_start: int = 0
) -> np.ndarray:
    """Recommendations of ``run_ucb_e`` for runs run_start.. ."""
    K = env.K
    if T < K:
        raise ValueError(f"budget T={T} below K={K}")
    means = np.asarray(env.means)
    bank = _StreamBank(seed)
    chunk = int(max(16, min(4096, 48_000_000 // max(K * T, 1))))
    recs = np.empty(num_runs, dtype=np.int64)

    buf = np.empty(T, dtype=np.float64)
    for lo, size in _chunks(run_start, num_runs, chunk):
        rewards = np.empty((size, K, T), dtype=np.uint8)
        for arm in range(K):
            for i in range(size):
                bank.fill(lo + i, arm, buf)
                rewards[i, arm] = buf < means[arm]
        counts = np.ones((size, K), dtype=np.int64)
        sums = rewards[:, :, 0].astype(np.float64)
        rows = np.arange(size)
        for _ in range(K, T):
            scores = sums / counts + np.sqrt(a / counts)
            arm = np.argmax(scores, axis=1)
            got = rewards[rows, arm, counts[rows, arm]]
            sums[rows, arm] += got
            counts[rows, arm] += 1
        recs[lo - run_start : lo - run_start + size] = np.argmax(sums / counts, axis=1)
    return recs
