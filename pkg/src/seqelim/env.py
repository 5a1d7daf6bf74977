"""Bandit environments: arm means, Bernoulli reward sampling, seeded streams.

Randomness contract
-------------------
All rewards come from counter-based Philox streams keyed by
``(seed, stream_id)``.  Two streams with the same key replay bit for bit;
distinct keys are statistically independent.  A Monte-Carlo run ``m`` of an
experiment with root seed ``s`` reads, for arm ``a``, the stream
``RngStream(s, m * ARM_STRIDE + a)``.  The j-th reward of arm ``a`` in run
``m`` is therefore a pure function of ``(s, m, a, j)``: runs can execute in
any order, in chunks, or in parallel and still produce identical results,
and algorithms sharing a root seed and run index are coupled through common
random numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_U64 = (1 << 64) - 1

# Per-run stride in the stream_id space; one slot per arm within each run.
# Caps arms per environment at 2**20, far beyond desk scale.
ARM_STRIDE = 1 << 20

BERNOULLI = "bernoulli"
_DIST_KINDS = (BERNOULLI,)


class NoUniqueBestArmError(ValueError):
    """The mean vector has a tied maximum, so no unique best arm exists."""


@dataclass(frozen=True)
class BanditEnv:
    """A K-armed stochastic bandit with fixed means and bounded rewards."""

    means: tuple[float, ...]
    dist_kind: str = BERNOULLI

    @property
    def K(self) -> int:
        return len(self.means)

    @property
    def best_arm(self) -> int:
        return max(range(self.K), key=lambda i: (self.means[i], -i))


@dataclass(frozen=True)
class GapVector:
    """Per-arm suboptimality gaps plus the ascending-gap ordering.

    ``sorted_index_map[r]`` is the original arm index of sorted rank ``r``;
    rank 0 is the best arm, ranks 1.. hold the suboptimal arms with
    nondecreasing gaps (ties broken by arm index).
    """

    gaps: tuple[float, ...]
    sorted_index_map: tuple[int, ...]

    @property
    def K(self) -> int:
        return len(self.gaps)

    @property
    def sorted_gaps(self) -> tuple[float, ...]:
        return tuple(self.gaps[i] for i in self.sorted_index_map)


def make_env(means, dist_kind: str = BERNOULLI) -> BanditEnv:
    """Build a validated environment; arms are not reordered."""
    means = tuple(float(m) for m in means)
    if len(means) < 2:
        raise ValueError(f"need at least 2 arms, got {len(means)}")
    if any(not (0.0 <= m <= 1.0) for m in means):
        raise ValueError("all means must lie in [0, 1]")
    if dist_kind not in _DIST_KINDS:
        raise ValueError(f"unsupported dist_kind {dist_kind!r}")
    top = max(means)
    if sum(1 for m in means if m == top) != 1:
        raise NoUniqueBestArmError("no unique best arm: the maximum mean is tied")
    return BanditEnv(means=means, dist_kind=dist_kind)


def gaps(env: BanditEnv) -> GapVector:
    """Suboptimality gaps mu_best - mu_i with the best arm at rank 0."""
    top = max(env.means)
    g = tuple(top - m for m in env.means)
    order = tuple(sorted(range(env.K), key=lambda i: (g[i], i)))
    return GapVector(gaps=g, sorted_index_map=order)


@dataclass
class RngStream:
    """A single reproducible reward stream, identified by (seed, stream_id).

    Single-owner: draws advance internal state.  Recreating the stream from
    the same key replays the identical sequence.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(
        init=False, repr=False, compare=False, default=None
    )

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            bitgen = np.random.Philox(key=[self.seed & _U64, self.stream_id & _U64])
            self._gen = np.random.Generator(bitgen)
        return self._gen

    def uniforms(self, n: int) -> np.ndarray:
        return self.generator.random(n)


def sample(env: BanditEnv, arm: int, rng: RngStream) -> float:
    """Draw one reward for ``arm`` and advance the stream."""
    if not 0 <= arm < env.K:
        raise IndexError(f"arm {arm} out of range for K={env.K}")
    return float(rng.generator.random() < env.means[arm])


class RewardStreams:
    """Per-arm reward streams for one algorithm run.

    Arm ``a`` reads ``RngStream(seed, run * ARM_STRIDE + a)``, so draws are
    independent of the order in which arms are sampled, and any algorithm
    run with the same (seed, run) observes the same j-th reward of each arm.
    """

    def __init__(self, env: BanditEnv, seed: int, run: int = 0):
        self.env = env
        self.seed = seed
        self.run = run
        self._gens: dict[int, np.random.Generator] = {}

    def _generator(self, arm: int) -> np.random.Generator:
        gen = self._gens.get(arm)
        if gen is None:
            gen = RngStream(self.seed, self.run * ARM_STRIDE + arm).generator
            self._gens[arm] = gen
        return gen

    def draw(self, arm: int, n: int) -> np.ndarray:
        """The next ``n`` rewards of ``arm`` as 0/1 floats."""
        u = self._generator(arm).random(n)
        return (u < self.env.means[arm]).astype(np.float64)


class ArmSampleAccumulator:
    """Running per-arm pull counts and reward sums.

    ``cumulative`` mode never forgets; ``per-round-reset`` mode supports
    algorithms that score each round from fresh samples only.
    """

    CUMULATIVE = "cumulative"
    PER_ROUND_RESET = "per-round-reset"

    def __init__(self, K: int, mode: str = CUMULATIVE):
        if mode not in (self.CUMULATIVE, self.PER_ROUND_RESET):
            raise ValueError(f"unknown accumulator mode {mode!r}")
        self.mode = mode
        self.counts = np.zeros(K, dtype=np.int64)
        self.sums = np.zeros(K, dtype=np.float64)

    def add(self, arm: int, rewards: np.ndarray) -> None:
        self.counts[arm] += len(rewards)
        self.sums[arm] += float(rewards.sum())

    def mean(self, arm: int) -> float:
        if self.counts[arm] == 0:
            raise ValueError(f"arm {arm} has no samples")
        return self.sums[arm] / self.counts[arm]

    def reset(self) -> None:
        if self.mode != self.PER_ROUND_RESET:
            raise ValueError("reset() only valid in per-round-reset mode")
        self.counts[:] = 0
        self.sums[:] = 0.0
