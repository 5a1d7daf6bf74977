"""Budget arithmetic for sequential elimination schedules.

A schedule fixes, before any sampling, how many cumulative pulls each
surviving arm must have by the end of every round (``n_r``) and how many
arms leave per round (``b_r``), given a decay sequence ``z_r`` and a total
budget ``T``.  The normalizer ``C`` guarantees the realized spend never
exceeds ``T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ScheduleSpec",
    "EliminationSchedule",
    "build_schedule",
    "nseqel_schedule",
    "verify_budget",
]


@dataclass(frozen=True)
class ScheduleSpec:
    """Raw schedule inputs: decay weights z, eliminations per round b, budget T."""

    z: tuple[float, ...]
    b: tuple[int, ...]
    T: int
    K: int

    @property
    def R(self) -> int:
        return len(self.z)


@dataclass(frozen=True)
class EliminationSchedule:
    """A feasible schedule: normalizer C, cumulative targets n_r, alive counts g_r.

    ``g`` has R+1 entries; ``g[0] = K`` arms start round 1 and ``g[R] = 1``
    arm survives the final round.
    """

    spec: ScheduleSpec
    C: float
    n: tuple[int, ...]
    g: tuple[int, ...]

    @property
    def K(self) -> int:
        return self.spec.K

    @property
    def R(self) -> int:
        return self.spec.R

    @property
    def T(self) -> int:
        return self.spec.T


def _ceil_snapped(x: float) -> int:
    # Ceiling with a one-part-in-1e9 snap so float noise cannot push a value
    # that is exactly integral in real arithmetic onto the next integer.
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def build_schedule(spec: ScheduleSpec) -> EliminationSchedule:
    """Validate a spec and compute (C, n_r, g_r), re-checking feasibility."""
    R, K, T = spec.R, spec.K, spec.T
    if K < 2:
        raise ValueError(f"need K >= 2 arms, got {K}")
    if T < K:
        raise ValueError(f"budget T={T} below K={K}; every arm needs one pull slot")
    if R < 1 or len(spec.b) != R:
        raise ValueError("z and b must be nonempty and equally long")
    if any(z <= 0 for z in spec.z):
        raise ValueError("z must be strictly positive")
    if any(spec.z[r] < spec.z[r + 1] for r in range(R - 1)):
        raise ValueError("z must be nonincreasing")
    if any(b < 1 or b != int(b) for b in spec.b):
        raise ValueError("b must be positive integers")
    if sum(spec.b) != K - 1:
        raise ValueError(f"sum(b)={sum(spec.b)} must equal K-1={K - 1}")

    C = 1.0 / spec.z[-1] + sum(spec.b[r] / spec.z[r] for r in range(R))
    n = tuple(_ceil_snapped((T - K) / (C * spec.z[r])) for r in range(R))
    g = []
    for r in range(R):
        g.append(sum(spec.b[r:]) + 1)
    g.append(1)

    sched = EliminationSchedule(spec=spec, C=C, n=n, g=tuple(g))
    verify_budget(sched)
    return sched


def nseqel_schedule(K: int, T: int, p: float) -> EliminationSchedule:
    """One-arm-per-round schedule with decay (K - r + 1)**p.

    ``p = 1`` divides the budget by the number of remaining arms each round;
    other exponents shift samples toward early (p > 1) or late (p < 1)
    rounds.
    """
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    if K < 2:
        raise ValueError(f"need K >= 2 arms, got {K}")
    z = tuple(float(K - r + 1) ** p for r in range(1, K))
    b = (1,) * (K - 1)
    return build_schedule(ScheduleSpec(z=z, b=b, T=T, K=K))


def verify_budget(sched: EliminationSchedule) -> int:
    """Total pulls implied by the schedule; asserts both spend identities.

    The per-elimination form (each of the b_r arms dropped at round r was
    pulled n_r times, the survivor n_R times) and the telescoped per-round
    form must agree exactly and stay within T.  A violation means the
    builder itself is broken.
    """
    spec, n, g = sched.spec, sched.n, sched.g
    total = n[-1] + sum(spec.b[r] * n[r] for r in range(spec.R))
    telescoped = g[0] * n[0] + sum(
        g[r] * (n[r] - n[r - 1]) for r in range(1, spec.R)
    )
    if total != telescoped:
        raise AssertionError(
            f"spend identities disagree: {total} != {telescoped} (builder bug)"
        )
    if total > spec.T:
        raise AssertionError(
            f"schedule spends {total} > budget {spec.T} (builder bug)"
        )
    return total
