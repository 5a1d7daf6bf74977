"""Block elimination with star-graph side observations.

Arms are partitioned into blocks, each containing a center connected to
every other member.  Pulling a block costs one budget unit, samples the
center, and reveals one fresh reward for every arm in the block.  Blocks
are eliminated one per round by comparing each block's best within-block
average; the final recommendation is the best arm of the surviving block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .algorithms import RoundRecord, RunRecord
from .env import ArmSampleAccumulator, BanditEnv, GapVector, RewardStreams, RngStream
from .schedule import _ceil_snapped

__all__ = [
    "BlockPartition",
    "BlockSchedule",
    "make_partition",
    "equal_blocks",
    "block_schedule_power",
    "run_block_elimination",
    "block_elimination_bound",
]


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint blocks covering all arms, each with a designated star center."""

    blocks: tuple[tuple[int, ...], ...]
    centers: tuple[int, ...]

    @property
    def M(self) -> int:
        return len(self.blocks)

    @property
    def K(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def max_block_size(self) -> int:
        return max(len(b) for b in self.blocks)


@dataclass(frozen=True)
class BlockSchedule:
    """Per-round cumulative block-pull targets n_r = ceil((T-M)/(C z_r))."""

    z: tuple[float, ...]
    C: float
    n: tuple[int, ...]
    T: int

    @property
    def M(self) -> int:
        return len(self.z)


def make_partition(blocks, centers=None) -> BlockPartition:
    """Validate a partition; centers default to each block's first arm."""
    blocks = tuple(tuple(int(a) for a in blk) for blk in blocks)
    if not blocks or any(len(b) == 0 for b in blocks):
        raise ValueError("blocks must be nonempty")
    flat = [a for blk in blocks for a in blk]
    K = len(flat)
    if sorted(flat) != list(range(K)):
        raise ValueError("blocks must partition arms 0..K-1 without overlap")
    if centers is None:
        centers = tuple(blk[0] for blk in blocks)
    else:
        centers = tuple(int(c) for c in centers)
        if len(centers) != len(blocks):
            raise ValueError("need one center per block")
        if any(c not in blk for c, blk in zip(centers, blocks)):
            raise ValueError("each center must belong to its block")
    return BlockPartition(blocks=blocks, centers=centers)


def equal_blocks(K: int, block_size: int) -> BlockPartition:
    """Contiguous equal-size blocks, e.g. (10, 4 blocks) for K=40."""
    if K % block_size != 0:
        raise ValueError(f"K={K} is not a multiple of block size {block_size}")
    blocks = [
        tuple(range(i, i + block_size)) for i in range(0, K, block_size)
    ]
    return make_partition(blocks)


def block_schedule_power(M: int, T: int, p: float) -> BlockSchedule:
    """Power-decay block schedule: z_r = (M+1-r)**p, except z_M = 2**p.

    The final round reuses the weight of the two-block round rather than
    dropping to 1, which is what makes the closed-form guarantee in
    ``block_elimination_bound`` come out.
    """
    if M < 1:
        raise ValueError(f"need M >= 1 blocks, got {M}")
    if T < M:
        raise ValueError(f"budget T={T} below M={M}")
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    z = tuple(float(M + 1 - r) ** p for r in range(1, M)) + (2.0**p,)
    C = sum(1.0 / zr for zr in z)
    n = tuple(_ceil_snapped((T - M) / (C * zr)) for zr in z)
    total = sum(n)
    if total > T:
        raise AssertionError(f"block schedule spends {total} > budget {T}")
    return BlockSchedule(z=z, C=C, n=n, T=T)


def run_block_elimination(
    env: BanditEnv,
    part: BlockPartition,
    bsched: BlockSchedule,
    rng: RngStream | int,
) -> RunRecord:
    """Eliminate whole blocks round by round, then pick the last block's best.

    Each block pull costs one budget unit and reveals a fresh sample for
    every member arm, so per-arm counts track the block-pull targets while
    total revealed observations exceed total budget spent whenever blocks
    are larger than singletons.
    """
    if part.K != env.K:
        raise ValueError(f"partition covers K={part.K}, environment has K={env.K}")
    if part.M != bsched.M:
        raise ValueError(f"partition has M={part.M} blocks, schedule M={bsched.M}")
    if bsched.T < part.M:
        raise ValueError(f"budget T={bsched.T} below M={part.M}")
    stream = rng if isinstance(rng, RngStream) else RngStream(rng)
    streams = RewardStreams(env, stream.seed, stream.stream_id)
    acc = ArmSampleAccumulator(env.K)
    alive = list(range(part.M))
    rounds = []
    total = 0
    observations = 0
    prev_n = 0
    for r in range(part.M):
        dr = bsched.n[r] - prev_n
        prev_n = bsched.n[r]
        for m in alive:
            for arm in part.blocks[m]:
                if dr > 0:
                    acc.add(arm, streams.draw(arm, dr))
            observations += dr * len(part.blocks[m])
        total += dr * len(alive)
        alive_arms = tuple(a for m in alive for a in part.blocks[m])
        if r < part.M - 1:
            j = _worst_block(part, acc, alive)
            rounds.append(
                RoundRecord(
                    alive=alive_arms,
                    pulls_each=dr,
                    eliminated=tuple(part.blocks[j]),
                )
            )
            alive.remove(j)
    assert len(alive) == 1
    last = part.blocks[alive[0]]
    recommended = _best_arm_in(acc, last)
    rounds.append(
        RoundRecord(
            alive=tuple(last),
            pulls_each=bsched.n[-1] - (bsched.n[-2] if part.M > 1 else 0),
            eliminated=tuple(a for a in last if a != recommended),
        )
    )
    return RunRecord(
        algorithm="block",
        params=(("M", float(part.M)),),
        recommended=recommended,
        rounds=tuple(rounds),
        total_pulls=total,
        counts=tuple(int(c) for c in acc.counts),
        seed=stream.seed,
        run_id=stream.stream_id,
        observations=observations,
    )


def _block_score(acc: ArmSampleAccumulator, block) -> tuple:
    # Best within-block average; blocks with no samples rank below any
    # sampled block.
    sampled = [a for a in block if acc.counts[a] > 0]
    if not sampled:
        return (0, 0.0)
    return (1, max(acc.sums[a] / acc.counts[a] for a in sampled))


def _worst_block(part: BlockPartition, acc: ArmSampleAccumulator, alive) -> int:
    # Ties eliminate the block whose smallest member index is largest,
    # keeping low-index blocks, consistent with the arm-level tie rule.
    return min(alive, key=lambda m: (_block_score(acc, part.blocks[m]), -min(part.blocks[m])))


def _best_arm_in(acc: ArmSampleAccumulator, block) -> int:
    def key(a: int):
        if acc.counts[a] == 0:
            return (0, 0.0, -a)
        return (1, acc.sums[a] / acc.counts[a], -a)

    return max(block, key=key)


def block_elimination_bound(part: BlockPartition, bsched: BlockSchedule, gv: GapVector):
    """Misidentification guarantee for block elimination, as a function of T:
    V M exp(-((T-M)/C) * 2 min_r gap_{M+1-r}^2 / z_r).

    Ranks refer to the globally sorted arm gaps with the best arm's gap
    read as the runner-up gap.  Blocks must be ordered by their best arm's
    mean, strictly at the top.
    """
    M, V = part.M, part.max_block_size
    sg = list(gv.sorted_gaps)
    if any(d <= 0.0 for d in sg[1:]):
        raise ValueError("tied best arms: gaps must be positive beyond rank 1")
    # Block order check: best (smallest) gap per block must strictly increase.
    best_gaps = [min(gv.gaps[a] for a in blk) for blk in part.blocks]
    for i in range(M - 1):
        if best_gaps[i] == best_gaps[i + 1]:
            raise ValueError("tied best arms across blocks")
        if best_gaps[i] > best_gaps[i + 1]:
            raise ValueError("blocks must be sorted by best-arm mean, descending")
    ranked = [sg[1]] + sg[1:M]  # gap ranks 1..M with rank 1 := rank 2
    slope = 2.0 * min(
        ranked[M - r] ** 2 / bsched.z[r - 1] for r in range(1, M + 1)
    )
    C = bsched.C

    def bound(T: float) -> float:
        return V * M * math.exp(-(T - M) / C * slope)

    return bound
