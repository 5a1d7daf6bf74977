"""Best-arm identification algorithms run against a bandit environment.

Tie-breaking is deterministic everywhere and always favors the smaller arm
index: among equal averages the smaller index survives elimination and wins
an argmax.  Arms with no samples at a decision point rank below every
sampled arm and are eliminated in ascending index order.  Within a round,
arms are sampled arm-major in ascending index; because every arm owns its
own reward stream the statistics do not depend on that order, but pinning
it keeps run records reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .env import ArmSampleAccumulator, BanditEnv, RewardStreams, RngStream
from .schedule import EliminationSchedule, nseqel_schedule

__all__ = [
    "RoundRecord",
    "RunRecord",
    "run_general_elimination",
    "run_nseqel",
    "run_succ_rej",
    "run_seq_halve",
    "run_ucb_e",
    "seq_halve_plan",
]


@dataclass(frozen=True)
class RoundRecord:
    """One elimination round: who was alive, per-arm pulls added, who left."""

    alive: tuple[int, ...]
    pulls_each: int
    eliminated: tuple[int, ...]


@dataclass(frozen=True)
class RunRecord:
    """Complete trace of one algorithm execution.

    The eliminated sets across rounds are disjoint and, together with the
    recommendation, cover all K arms.  For the horizon-based baseline the
    single round "eliminates" every non-recommended arm at the end, which
    keeps that partition property total.  ``observations`` counts revealed
    reward samples and equals ``total_pulls`` unless side observations are
    in play.
    """

    algorithm: str
    params: tuple[tuple[str, float], ...]
    recommended: int
    rounds: tuple[RoundRecord, ...]
    total_pulls: int
    counts: tuple[int, ...]
    seed: int
    run_id: int
    observations: int = field(default=-1)

    def __post_init__(self):
        if self.observations < 0:
            object.__setattr__(self, "observations", self.total_pulls)


def _as_stream(rng: RngStream | int) -> RngStream:
    return RngStream(rng) if isinstance(rng, int) else rng


def _reward_source(env: BanditEnv, rng) -> tuple:
    """(source, seed, run_id); ``rng`` may already be a draw(arm, n) source."""
    if hasattr(rng, "draw"):
        return rng, getattr(rng, "seed", -1), getattr(rng, "run", -1)
    stream = _as_stream(rng)
    return RewardStreams(env, stream.seed, stream.stream_id), stream.seed, stream.stream_id


def elimination_order(counts, sums, candidates) -> list[int]:
    """Candidates sorted worst-first under the pinned tie rules.

    Unsampled arms come first in ascending index; sampled arms follow by
    ascending average, equal averages resolved by eliminating the larger
    index first.
    """

    def key(arm: int):
        c = counts[arm]
        if c == 0:
            return (0, arm, 0.0)
        return (1, sums[arm] / c, -arm)

    return sorted(candidates, key=key)


def run_general_elimination(
    env: BanditEnv, sched: EliminationSchedule, rng: RngStream | int
) -> RunRecord:
    """Execute a schedule: sample survivors to n_r, drop the b_r worst, repeat.

    Averages are cumulative across rounds.  Returns the lone survivor.
    """
    if sched.K != env.K:
        raise ValueError(f"schedule is for K={sched.K}, environment has K={env.K}")
    streams, seed, run_id = _reward_source(env, rng)
    acc = ArmSampleAccumulator(env.K)
    alive = list(range(env.K))
    rounds = []
    total = 0
    prev_n = 0
    for r in range(sched.R):
        dr = sched.n[r] - prev_n
        prev_n = sched.n[r]
        for arm in alive:
            if dr > 0:
                acc.add(arm, streams.draw(arm, dr))
        total += dr * len(alive)
        worst = elimination_order(acc.counts, acc.sums, alive)[: sched.spec.b[r]]
        eliminated = tuple(sorted(worst))
        rounds.append(
            RoundRecord(alive=tuple(alive), pulls_each=dr, eliminated=eliminated)
        )
        alive = [a for a in alive if a not in set(worst)]
    assert len(alive) == 1
    return RunRecord(
        algorithm="general-elimination",
        params=(),
        recommended=alive[0],
        rounds=tuple(rounds),
        total_pulls=total,
        counts=tuple(int(c) for c in acc.counts),
        seed=seed,
        run_id=run_id,
    )


def run_nseqel(
    env: BanditEnv, T: int, p: float, rng: RngStream | int
) -> RunRecord:
    """Nonlinear one-arm-per-round elimination with budget decay (K-r+1)**p."""
    rec = run_general_elimination(env, nseqel_schedule(env.K, T, p), rng)
    return _retag(rec, "nseqel", (("p", float(p)),))


def run_succ_rej(env: BanditEnv, T: int, rng: RngStream | int) -> RunRecord:
    """Classic one-arm-per-round elimination; identical to ``run_nseqel(p=1)``."""
    rec = run_general_elimination(env, nseqel_schedule(env.K, T, 1.0), rng)
    return _retag(rec, "succ-rej", ())


def _retag(rec: RunRecord, algorithm: str, params) -> RunRecord:
    return RunRecord(
        algorithm=algorithm,
        params=params,
        recommended=rec.recommended,
        rounds=rec.rounds,
        total_pulls=rec.total_pulls,
        counts=rec.counts,
        seed=rec.seed,
        run_id=rec.run_id,
    )


def seq_halve_plan(K: int, T: int) -> tuple[int, list[int], list[int]]:
    """(rounds R, alive counts per round, fresh pulls per arm per round).

    R = ceil(log2 K); round r keeps the best ceil(g/2) of g survivors, each
    scored on floor(T / (g * R)) fresh samples.
    """
    if K < 2:
        raise ValueError(f"need K >= 2 arms, got {K}")
    R = math.ceil(math.log2(K))
    sizes, pulls = [], []
    g = K
    for _ in range(R):
        t = T // (g * R)
        if t < 1:
            raise ValueError(
                f"budget T={T} cannot give each of {g} arms one pull over {R} rounds"
            )
        sizes.append(g)
        pulls.append(t)
        g = math.ceil(g / 2)
    assert g == 1
    return R, sizes, pulls


def run_seq_halve(env: BanditEnv, T: int, rng: RngStream | int) -> RunRecord:
    """Halving elimination: each round scores survivors on fresh samples only."""
    R, _, pulls = seq_halve_plan(env.K, T)
    streams, seed, run_id = _reward_source(env, rng)
    counts = np.zeros(env.K, dtype=np.int64)
    alive = list(range(env.K))
    rounds = []
    total = 0
    for r in range(R):
        t = pulls[r]
        acc = ArmSampleAccumulator(env.K, mode=ArmSampleAccumulator.PER_ROUND_RESET)
        for arm in alive:
            acc.add(arm, streams.draw(arm, t))
            counts[arm] += t
        total += t * len(alive)
        keep = math.ceil(len(alive) / 2)
        order = elimination_order(acc.counts, acc.sums, alive)
        dropped = order[: len(alive) - keep]
        rounds.append(
            RoundRecord(
                alive=tuple(alive), pulls_each=t, eliminated=tuple(sorted(dropped))
            )
        )
        alive = [a for a in alive if a not in set(dropped)]
    assert len(alive) == 1
    return RunRecord(
        algorithm="seq-halve",
        params=(),
        recommended=alive[0],
        rounds=tuple(rounds),
        total_pulls=total,
        counts=tuple(int(c) for c in counts),
        seed=seed,
        run_id=run_id,
    )


def run_ucb_e(
    env: BanditEnv, T: int, a: float, rng: RngStream | int
) -> RunRecord:
    """Optimism baseline: pull argmax of mean + sqrt(a / count) for T pulls.

    Needs the exploration strength ``a`` up front (the benchmark feeds it
    c * T / H1 from the true complexity, an oracle advantage).  Recommends
    the largest empirical mean at the horizon.
    """
    if T < env.K:
        raise ValueError(f"budget T={T} below K={env.K}")
    if a <= 0:
        raise ValueError(f"exploration parameter a must be positive, got {a}")
    streams, seed, run_id = _reward_source(env, rng)
    counts = np.zeros(env.K, dtype=np.int64)
    sums = np.zeros(env.K, dtype=np.float64)
    for arm in range(env.K):
        sums[arm] += streams.draw(arm, 1)[0]
        counts[arm] += 1
    for _ in range(env.K, T):
        scores = sums / counts + np.sqrt(a / counts)
        arm = int(np.argmax(scores))
        sums[arm] += streams.draw(arm, 1)[0]
        counts[arm] += 1
    recommended = int(np.argmax(sums / counts))
    # Single pseudo-round rejecting everything but the recommendation at the
    # horizon; per-arm allocations live in counts, not pulls_each.
    others = tuple(i for i in range(env.K) if i != recommended)
    rounds = (
        RoundRecord(alive=tuple(range(env.K)), pulls_each=0, eliminated=others),
    )
    return RunRecord(
        algorithm="ucb-e",
        params=(("a", float(a)),),
        recommended=recommended,
        rounds=rounds,
        total_pulls=T,
        counts=tuple(int(c) for c in counts),
        seed=seed,
        run_id=run_id,
    )
