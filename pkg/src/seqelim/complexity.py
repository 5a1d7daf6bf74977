"""Problem-complexity measures, misidentification bounds, and the p advisor.

All measures index arms by their rank in the ascending-gap order (rank 1 is
the best arm), so callers may pass environments in any arm order.  All
logarithms in the interpolation formula for the p interval are natural;
see ``advise_p`` for the regime-gate convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .env import GapVector
from .schedule import EliminationSchedule

__all__ = [
    "ComplexityReport",
    "BoundSpec",
    "RegimeSpec",
    "PInterval",
    "h1",
    "h2",
    "h_p",
    "c_p",
    "logbar",
    "complexity_report",
    "decay_envelope",
    "nseqel_bound",
    "elimination_bound",
    "advise_p",
    "classify_regime",
]

ARITHMETIC = "arithmetic"
LARGE_GROUP = "large-group"
SMALL_GROUP = "small-group"
CUSTOM = "custom"


@dataclass(frozen=True)
class ComplexityReport:
    """The standard complexity measures of one gap instance."""

    K: int
    H1: float
    H2: float
    H_p: dict[float, float]
    C_p: dict[float, float]
    logbar_K: float


@dataclass(frozen=True)
class BoundSpec:
    """Exponential-decay envelope beta * exp(-T / alpha) for one algorithm."""

    algorithm: str
    alpha: float
    beta: float

    def __call__(self, T: float) -> float:
        return self.beta * math.exp(-T / self.alpha)


@dataclass(frozen=True)
class RegimeSpec:
    """Gap-structure classification: competitive-arm count and regime tag."""

    f_K: int
    epsilon: float
    regime: str


@dataclass(frozen=True)
class PInterval:
    """Advised range of the budget-decay exponent p."""

    lower: float
    upper: float
    lower_open: bool
    upper_open: bool
    regime: str

    @property
    def suggestion(self) -> float:
        return 0.5 * (self.lower + self.upper)


def _sorted_positive_gaps(gv: GapVector) -> list[float]:
    sg = list(gv.sorted_gaps)
    if sg[0] != 0.0:
        raise ValueError("gap vector has no zero entry for the best arm")
    if any(d <= 0.0 for d in sg[1:]):
        raise ValueError("a suboptimal arm has zero gap (tied best arm)")
    return sg


def h1(gv: GapVector) -> float:
    """Sum of inverse squared gaps over the suboptimal arms."""
    sg = _sorted_positive_gaps(gv)
    return sum(1.0 / d**2 for d in sg[1:])


def h_p(gv: GapVector, p: float) -> float:
    """max over sorted ranks i >= 2 of i**p / gap_i**2."""
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    sg = _sorted_positive_gaps(gv)
    return max(i**p / sg[i - 1] ** 2 for i in range(2, len(sg) + 1))


def h2(gv: GapVector) -> float:
    """max over sorted ranks i >= 2 of i / gap_i**2; equals ``h_p(gv, 1)``."""
    return h_p(gv, 1.0)


def c_p(K: int, p: float) -> float:
    """Normalizer 2**-p + sum_{r=2..K} r**-p of the nonlinear schedule."""
    if K < 2:
        raise ValueError(f"need K >= 2, got {K}")
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return 2.0**-p + sum(r ** -float(p) for r in range(2, K + 1))


def logbar(K: int) -> float:
    """0.5 + sum_{i=2..K} 1/i; the p = 1 normalizer."""
    if K < 2:
        raise ValueError(f"need K >= 2, got {K}")
    return 0.5 + sum(1.0 / i for i in range(2, K + 1))


def complexity_report(gv: GapVector, p_values=(0.5, 0.75, 1.0, 1.35, 1.7, 2.0)) -> ComplexityReport:
    K = gv.K
    return ComplexityReport(
        K=K,
        H1=h1(gv),
        H2=h2(gv),
        H_p={p: h_p(gv, p) for p in p_values},
        C_p={p: c_p(K, p) for p in p_values},
        logbar_K=logbar(K),
    )


def decay_envelope(algorithm: str, gv: GapVector, p: float | None = None) -> BoundSpec:
    """The published (alpha, beta) envelope for one algorithm.

    These envelopes are looser than the exact forms below (the nonlinear
    entry keeps only half the exponent rate); use ``nseqel_bound`` or
    ``elimination_bound`` when comparing against simulations.
    """
    K = gv.K
    if algorithm == "succ-rej":
        alpha = h2(gv) * logbar(K)
        beta = 0.5 * K * (K - 1) * math.exp(K / alpha)
    elif algorithm == "seq-halve":
        alpha = 8.0 * h2(gv) * math.log2(K)
        beta = 3.0 * math.log2(K)
    elif algorithm == "nseqel":
        if p is None:
            raise ValueError("the nseqel row needs the exponent p")
        alpha = h_p(gv, p) * c_p(K, p)
        beta = (K - 1) * math.exp(K / alpha)
    else:
        raise ValueError(f"unknown algorithm tag {algorithm!r}")
    return BoundSpec(algorithm=algorithm, alpha=alpha, beta=beta)


def nseqel_bound(gv: GapVector, p: float):
    """Exact guarantee for the nonlinear schedule, as a function of T:
    (K-1) * exp(-2 (T-K) / (C_p H(p)))."""
    K = gv.K
    rate = c_p(K, p) * h_p(gv, p)

    def bound(T: float) -> float:
        return (K - 1) * math.exp(-2.0 * (T - K) / rate)

    return bound


def elimination_bound(sched: EliminationSchedule, gv: GapVector):
    """General-schedule guarantee as a function of T:
    R max_r b_r * exp(-((T-K)/C) * min_r 2 gap_{g_{r+1}+1}^2 / z_r)."""
    if sched.K != gv.K:
        raise ValueError(f"schedule K={sched.K} does not match gaps K={gv.K}")
    sg = _sorted_positive_gaps(gv)
    spec = sched.spec
    slope = min(
        2.0 * sg[sched.g[r + 1]] ** 2 / spec.z[r] for r in range(spec.R)
    )
    front = spec.R * max(spec.b)
    C, K = sched.C, sched.K

    def bound(T: float) -> float:
        return front * math.exp(-(T - K) / C * slope)

    return bound


def advise_p(K: int | float, f_K: float) -> PInterval:
    """Suitable range of the decay exponent given ~f_K competitive arms.

    The interpolation formula (natural logs, clamped into (0, 2]) covers
    the middle regime; a handful of clearly-competitive arms pins (1, 2]
    and a near-linear competitive fraction pins (0, 1).  The regime gates
    use decimal logs so that power-law counts K**gamma with 0 < gamma < 1
    land in the interpolation row at benchmark scales.
    """
    if K < 3:
        raise ValueError(f"need K >= 3, got {K}")
    if not 1 <= f_K <= K - 1:
        raise ValueError(f"f_K={f_K} outside [1, K-1]")
    if f_K <= math.log10(K):
        return PInterval(1.0, 2.0, True, False, SMALL_GROUP)
    if f_K >= K / math.log10(K):
        return PInterval(0.0, 1.0, True, True, LARGE_GROUP)
    loglog = math.log(math.log(K))
    lower = 1.0 - loglog / math.log(K / f_K)
    upper = 1.0 + loglog / math.log(f_K)
    return PInterval(max(lower, 0.0), min(upper, 2.0), True, True, CUSTOM)


def classify_regime(gv: GapVector, epsilon: float = 0.05) -> RegimeSpec:
    """Tag the gap structure: arithmetic, large or small competitive group.

    Arithmetic means gap_i = (i-1) * gap_2 to 1e-9 relative tolerance on
    sorted ranks.  Otherwise f_K counts arms within (1+epsilon) of the
    smallest gap; at least K/ln K of them is a large group, at most ln K a
    small one, anything between is custom.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    sg = _sorted_positive_gaps(gv)
    K = len(sg)
    d0 = sg[1]
    f_K = sum(1 for d in sg[1:] if d / d0 <= 1.0 + epsilon)
    arithmetic = all(
        abs(sg[i - 1] - (i - 1) * d0) <= 1e-9 * max(1.0, (i - 1) * d0)
        for i in range(2, K + 1)
    )
    if arithmetic:
        return RegimeSpec(f_K=f_K, epsilon=epsilon, regime=ARITHMETIC)
    if f_K >= K / math.log(K):
        return RegimeSpec(f_K=f_K, epsilon=epsilon, regime=LARGE_GROUP)
    if f_K <= math.log(K):
        return RegimeSpec(f_K=f_K, epsilon=epsilon, regime=SMALL_GROUP)
    return RegimeSpec(f_K=f_K, epsilon=epsilon, regime=CUSTOM)
