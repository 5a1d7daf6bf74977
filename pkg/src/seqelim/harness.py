"""Benchmark harness: canonical setups, Monte-Carlo batches, exact oracle.

Every experiment is driven by one root seed.  Run ``m`` of every algorithm
reads the same per-arm streams (common random numbers), so frequency
ratios between algorithms are sharper than independent sampling would
give, while each algorithm's marginal distribution is untouched.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .algorithms import (
    elimination_order,
    run_nseqel,
    run_seq_halve,
    run_succ_rej,
    run_ucb_e,
    seq_halve_plan,
)
from .env import BanditEnv, RngStream, gaps, make_env
from .complexity import h1
from .schedule import _ceil_snapped, nseqel_schedule

__all__ = [
    "SETUP_IDS",
    "AlgorithmSpec",
    "AlgorithmResult",
    "ExperimentReport",
    "RatioEntry",
    "ExactOracleResult",
    "EnumerationLimitError",
    "default_bench_algorithms",
    "make_setup",
    "setup_budget",
    "run_experiment",
    "run_block_experiment",
    "summarize_ratios",
    "exact_misid_probability",
    "report_to_csv",
    "report_to_json",
    "report_from_json",
    "CSV_COLUMNS",
]

SETUP_IDS = ("setup1", "setup2", "setup3", "setup4", "setup5", "setup6", "geo7")
_SETUP_K = {sid: (40, 120) for sid in SETUP_IDS[:6]}
_SETUP_K["geo7"] = (7,)

CSV_COLUMNS = (
    "setup",
    "K",
    "T",
    "runs",
    "alg",
    "params",
    "errors",
    "freq",
    "ci_half",
    "seed",
)

ENUMERATION_LIMIT = 1 << 24


class EnumerationLimitError(RuntimeError):
    """The exact oracle would need to expand more than the allowed states."""


def make_setup(setup_id: str, K: int | None = None) -> BanditEnv:
    """One of the canonical benchmark instances; best arm mean is 0.7.

    The group boundary in setups 2 and 3 is m = ceil(ln(K/2) + 1) with the
    natural log (4 at K=40, 6 at K=120); a base-2 reading would give larger
    groups, so comparisons against other implementations should check this
    convention first.
    """
    if setup_id not in SETUP_IDS:
        raise ValueError(f"unknown setup {setup_id!r}")
    if K is None and setup_id == "geo7":
        K = 7
    if K not in _SETUP_K[setup_id]:
        raise ValueError(
            f"{setup_id} is defined for K in {_SETUP_K[setup_id]}, got {K}"
        )
    mu1 = 0.7
    if setup_id == "setup1":
        means = [mu1] + [0.6] * (K - 1)
    elif setup_id in ("setup2", "setup3"):
        m = math.ceil(math.log(K / 2) + 1)
        means = [mu1]
        means += [mu1 - 2 / K] * (m - 1)  # arms 2..m
        if setup_id == "setup2":
            means += [0.4] * (K - m)
        else:
            means += [mu1 - 4 / K] * m  # arms m+1..2m
            means += [0.4] * (K - 2 * m)
    elif setup_id == "setup4":
        means = [mu1] + [mu1 - 0.6 * (i - 1) / (K - 1) for i in range(2, K + 1)]
    elif setup_id == "setup5":
        means = [mu1] + [mu1 - 0.01 * (1 + 4 / K) ** (i - 2) for i in range(2, K + 1)]
    elif setup_id == "setup6":
        means = [mu1, mu1 - 1 / (2 * K)] + [0.2] * (K - 2)
    else:  # geo7
        means = [mu1] + [mu1 - 0.6 ** (8 - i) for i in range(2, 8)]
    return make_env(means)


def setup_budget(env: BanditEnv) -> int:
    """The benchmark budget: ceil of the inverse-squared-gap sum.

    Snapped ceiling, so float noise in the gaps cannot bump an exactly
    integral complexity (39 / 0.1**2 = 3900) to the next integer.
    """
    return _ceil_snapped(h1(gaps(env)))


@dataclass(frozen=True)
class AlgorithmSpec:
    """An algorithm plus its tuning, as used in experiment rosters.

    ``ucb-e`` takes either the raw exploration strength ``a`` or the oracle
    multiplier ``c`` (resolved to a = c * T / H1 of the true instance).
    """

    kind: str
    p: float | None = None
    c: float | None = None
    a: float | None = None

    def __post_init__(self):
        if self.kind in ("nseqel",):
            if self.p is None or self.p <= 0:
                raise ValueError("nseqel needs p > 0")
        elif self.kind in ("succ-rej", "seq-halve"):
            if self.p is not None:
                raise ValueError(f"{self.kind} takes no p")
        elif self.kind == "ucb-e":
            if (self.c is None) == (self.a is None):
                raise ValueError("ucb-e needs exactly one of c or a")
        else:
            raise ValueError(f"unknown algorithm kind {self.kind!r}")

    @property
    def params_str(self) -> str:
        if self.kind == "nseqel":
            return f"p={self.p:g}"
        if self.kind == "ucb-e":
            return f"c={self.c:g}" if self.c is not None else f"a={self.a:g}"
        return ""

    @property
    def label(self) -> str:
        ps = self.params_str
        return f"{self.kind}({ps})" if ps else self.kind

    def resolve_a(self, env: BanditEnv, T: int) -> float:
        if self.a is not None:
            return self.a
        return self.c * T / h1(gaps(env))


def default_bench_algorithms() -> tuple[AlgorithmSpec, ...]:
    """The nine benchmark entries, in bar-index order."""
    return (
        AlgorithmSpec("nseqel", p=0.75),
        AlgorithmSpec("nseqel", p=1.35),
        AlgorithmSpec("nseqel", p=1.7),
        AlgorithmSpec("nseqel", p=2.0),
        AlgorithmSpec("succ-rej"),
        AlgorithmSpec("seq-halve"),
        AlgorithmSpec("ucb-e", c=1.0),
        AlgorithmSpec("ucb-e", c=2.0),
        AlgorithmSpec("ucb-e", c=4.0),
    )


@dataclass(frozen=True)
class AlgorithmResult:
    label: str
    kind: str
    params: str
    runs: int
    errors: int
    misid: int
    freq: float
    ci_half: float
    error_message: str = ""


@dataclass(frozen=True)
class ExperimentReport:
    setup: str
    K: int
    T: int
    runs: int
    seed: int
    results: tuple[AlgorithmResult, ...]

    def result(self, label: str) -> AlgorithmResult:
        for r in self.results:
            if r.label == label:
                return r
        raise KeyError(f"no result labeled {label!r}")


@dataclass(frozen=True)
class RatioEntry:
    """freq(baseline) / freq(algorithm), with a delta-method CI."""

    label: str
    ratio: float
    ci_half: float
    defined: bool


def _ci_half(misid: int, runs: int) -> float:
    # 95% normal approximation; adequate at thousands of runs per the
    # benchmark protocol, exact intervals are out of scope here.
    if runs == 0:
        return 0.0
    p = misid / runs
    return 1.96 * math.sqrt(p * (1.0 - p) / runs)


def _run_sequential(env, spec: AlgorithmSpec, T, a, seed, run_indices) -> np.ndarray:
    recs = np.empty(len(run_indices), dtype=np.int64)
    for i, m in enumerate(run_indices):
        stream = RngStream(seed, m)
        if spec.kind == "nseqel":
            rec = run_nseqel(env, T, spec.p, stream)
        elif spec.kind == "succ-rej":
            rec = run_succ_rej(env, T, stream)
        elif spec.kind == "seq-halve":
            rec = run_seq_halve(env, T, stream)
        else:
            rec = run_ucb_e(env, T, a, stream)
        recs[i] = rec.recommended
    return recs


def _recommendations(env, spec: AlgorithmSpec, T, seed, num_runs, run_start, a):
    if spec.kind in ("nseqel", "succ-rej"):
        p = spec.p if spec.kind == "nseqel" else 1.0
        sched = nseqel_schedule(env.K, T, p)
        if sched.n[0] >= 1:
            return _kernels.batch_elimination(env, sched, seed, num_runs, run_start)
    elif spec.kind == "seq-halve":
        return _kernels.batch_seq_halve(env, T, seed, num_runs, run_start)
    elif spec.kind == "ucb-e":
        return _kernels.batch_ucb_e(env, T, a, seed, num_runs, run_start)
    return _run_sequential(env, spec, T, a, seed, range(run_start, run_start + num_runs))


def run_experiment(
    env: BanditEnv,
    algorithms,
    T: int,
    num_runs: int,
    root_seed: int,
    parallelism: int = 1,
    setup: str = "custom",
) -> ExperimentReport:
    """Monte-Carlo misidentification frequencies for a roster of algorithms.

    Deterministic given ``root_seed``, whatever the parallelism degree: runs
    are split into fixed chunks whose partial counts are summed.  A failing
    algorithm is reported with its error and does not abort the batch.
    """
    if num_runs < 1:
        raise ValueError("num_runs must be >= 1")
    if T < env.K:
        raise ValueError(f"budget T={T} below K={env.K}")
    best = env.best_arm
    chunk = 1024
    starts = list(range(0, num_runs, chunk))
    results = []
    for spec in algorithms:
        try:
            a = spec.resolve_a(env, T) if spec.kind == "ucb-e" else None

            def job(lo, spec=spec, a=a):
                size = min(chunk, num_runs - lo)
                recs = _recommendations(env, spec, T, root_seed, size, lo, a)
                return int(np.sum(recs != best))

            if parallelism > 1 and len(starts) > 1:
                with ThreadPoolExecutor(max_workers=parallelism) as pool:
                    misid = sum(pool.map(job, starts))
            else:
                misid = sum(job(lo) for lo in starts)
            results.append(
                AlgorithmResult(
                    label=spec.label,
                    kind=spec.kind,
                    params=spec.params_str,
                    runs=num_runs,
                    errors=0,
                    misid=misid,
                    freq=misid / num_runs,
                    ci_half=_ci_half(misid, num_runs),
                )
            )
        except Exception as exc:  # noqa: BLE001 - reported, not silenced
            results.append(
                AlgorithmResult(
                    label=spec.label,
                    kind=spec.kind,
                    params=spec.params_str,
                    runs=num_runs,
                    errors=num_runs,
                    misid=0,
                    freq=float("nan"),
                    ci_half=float("nan"),
                    error_message=f"{type(exc).__name__}: {exc}",
                )
            )
    return ExperimentReport(
        setup=setup,
        K=env.K,
        T=T,
        runs=num_runs,
        seed=root_seed,
        results=tuple(results),
    )


def run_block_experiment(
    env: BanditEnv,
    part,
    bsched,
    num_runs: int,
    root_seed: int,
    setup: str = "custom",
) -> ExperimentReport:
    """Monte-Carlo batch for block elimination (sequential runs)."""
    from .sideobs import run_block_elimination

    best = env.best_arm
    misid = 0
    for m in range(num_runs):
        rec = run_block_elimination(env, part, bsched, RngStream(root_seed, m))
        misid += rec.recommended != best
    result = AlgorithmResult(
        label=f"block(M={part.M})",
        kind="block",
        params=f"M={part.M}",
        runs=num_runs,
        errors=0,
        misid=misid,
        freq=misid / num_runs,
        ci_half=_ci_half(misid, num_runs),
    )
    return ExperimentReport(
        setup=setup,
        K=env.K,
        T=bsched.T,
        runs=num_runs,
        seed=root_seed,
        results=(result,),
    )


def summarize_ratios(report: ExperimentReport, baseline_label: str) -> list[RatioEntry]:
    """freq(baseline) / freq(alg) per algorithm, CI by the delta method."""
    base = report.result(baseline_label)
    if base.freq == 0 or math.isnan(base.freq):
        return [
            RatioEntry(label=r.label, ratio=float("inf"), ci_half=float("nan"), defined=False)
            for r in report.results
        ]
    out = []
    for r in report.results:
        if r.freq == 0 or math.isnan(r.freq):
            out.append(RatioEntry(r.label, float("inf"), float("nan"), False))
            continue
        ratio = base.freq / r.freq
        # var(log ratio) ~ (1-p1)/(n p1) + (1-p2)/(n p2)
        var_log = (1 - base.freq) / (base.runs * base.freq) + (1 - r.freq) / (
            r.runs * r.freq
        )
        out.append(RatioEntry(r.label, ratio, 1.96 * ratio * math.sqrt(var_log), True))
    return out


# ---------------------------------------------------------------------------
# Exact misidentification oracle


@dataclass(frozen=True)
class ExactOracleResult:
    probability: float
    enumeration_size: int


def _binom_pmf(n: int, p: float) -> list[float]:
    q = 1.0 - p
    return [math.comb(n, k) * p**k * q ** (n - k) for k in range(n + 1)]


class _WorkMeter:
    def __init__(self, limit: int = ENUMERATION_LIMIT):
        self.limit = limit
        self.work = 0

    def charge(self, amount: int) -> None:
        self.work += amount
        if self.work > self.limit:
            raise EnumerationLimitError(
                f"exact enumeration exceeds {self.limit} states"
            )


def _round_dp(env, alive0, rounds, meter) -> dict[int, float]:
    """Shared DP over elimination rounds.

    ``rounds`` yields (pulls_each, cumulative_counts, drop_count, reset);
    states map (alive tuple, sums tuple) to probability.  Returns the
    survivor distribution.
    """
    states = {(tuple(alive0), (0,) * len(alive0)): 1.0}
    for pulls, count_after, drop, reset in rounds:
        pmfs = {a: _binom_pmf(pulls, env.means[a]) for a in alive0}
        nxt: dict[tuple, float] = {}
        for (alive, sums), prob in states.items():
            meter.charge((pulls + 1) ** len(alive))
            base = list(sums)
            for added in itertools.product(range(pulls + 1), repeat=len(alive)):
                w = prob
                for a, k in zip(alive, added):
                    w *= pmfs[a][k]
                if w == 0.0:
                    continue
                new_sums = [s + k for s, k in zip(base, added)]
                counts = {a: count_after for a in alive}
                total = {a: s for a, s in zip(alive, new_sums)}
                dropped = set(elimination_order(counts, total, alive)[:drop])
                kept = tuple(a for a in alive if a not in dropped)
                if reset:
                    kept_sums = (0,) * len(kept)
                else:
                    kept_sums = tuple(
                        s for a, s in zip(alive, new_sums) if a not in dropped
                    )
                key = (kept, kept_sums)
                nxt[key] = nxt.get(key, 0.0) + w
        states = nxt
    out: dict[int, float] = {}
    for (alive, _sums), prob in states.items():
        assert len(alive) == 1
        out[alive[0]] = out.get(alive[0], 0.0) + prob
    return out


def _oracle_elimination(env, sched, meter) -> dict[int, float]:
    rounds = []
    prev = 0
    for r in range(sched.R):
        pulls = sched.n[r] - prev
        prev = sched.n[r]
        rounds.append((pulls, sched.n[r], sched.spec.b[r], False))
    return _round_dp(env, range(env.K), rounds, meter)


def _oracle_seq_halve(env, T, meter) -> dict[int, float]:
    R, sizes, pulls = seq_halve_plan(env.K, T)
    rounds = []
    for r in range(R):
        g = sizes[r]
        rounds.append((pulls[r], pulls[r], g - (g + 1) // 2, True))
    return _round_dp(env, range(env.K), rounds, meter)


def _oracle_ucb_e(env, T, a, meter) -> dict[int, float]:
    K = env.K
    means = env.means
    memo: dict[tuple, dict[int, float]] = {}

    def recommend(counts, sums) -> int:
        return max(range(K), key=lambda i: (sums[i] / counts[i], -i))

    def go(counts: tuple, sums: tuple) -> dict[int, float]:
        t = sum(counts)
        if t == T:
            return {recommend(counts, sums): 1.0}
        key = (counts, sums)
        hit = memo.get(key)
        if hit is not None:
            return hit
        meter.charge(1)
        if t < K:
            arm = t
        else:
            arm = max(
                range(K),
                key=lambda i: (sums[i] / counts[i] + math.sqrt(a / counts[i]), -i),
            )
        out: dict[int, float] = {}
        for reward, w in ((1, means[arm]), (0, 1.0 - means[arm])):
            if w == 0.0:
                continue
            c = list(counts)
            s = list(sums)
            c[arm] += 1
            s[arm] += reward
            for j, pr in go(tuple(c), tuple(s)).items():
                out[j] = out.get(j, 0.0) + w * pr
        memo[key] = out
        return out

    return go((0,) * K, (0,) * K)


def exact_misid_probability(
    env: BanditEnv, spec: AlgorithmSpec, T: int
) -> ExactOracleResult:
    """Exact misidentification probability by weighted enumeration.

    Walks every reachable sufficient-statistic state of the deterministic
    algorithm under Bernoulli rewards, weighting by probability; refuses
    instances whose expansion would exceed the enumeration limit.
    """
    if env.dist_kind != "bernoulli":
        raise ValueError("the oracle handles Bernoulli environments only")
    meter = _WorkMeter()
    if spec.kind in ("nseqel", "succ-rej"):
        p = spec.p if spec.kind == "nseqel" else 1.0
        dist = _oracle_elimination(env, nseqel_schedule(env.K, T, p), meter)
    elif spec.kind == "seq-halve":
        dist = _oracle_seq_halve(env, T, meter)
    elif spec.kind == "ucb-e":
        dist = _oracle_ucb_e(env, T, spec.resolve_a(env, T), meter)
    else:
        raise ValueError(f"no exact oracle for algorithm kind {spec.kind!r}")
    misid = sum(p for arm, p in dist.items() if arm != env.best_arm)
    return ExactOracleResult(probability=misid, enumeration_size=meter.work)


# ---------------------------------------------------------------------------
# Serialization


def report_to_csv(report: ExperimentReport) -> str:
    """Fixed-schema CSV, one row per algorithm; floats keep full precision."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.results:
        w.writerow(
            [
                report.setup,
                report.K,
                report.T,
                report.runs,
                r.kind,
                r.params,
                r.errors,
                repr(r.freq),
                repr(r.ci_half),
                report.seed,
            ]
        )
    return buf.getvalue()


def report_to_json(report: ExperimentReport) -> str:
    doc = {
        "setup": report.setup,
        "K": report.K,
        "T": report.T,
        "runs": report.runs,
        "seed": report.seed,
        "results": [
            {
                "label": r.label,
                "kind": r.kind,
                "params": r.params,
                "runs": r.runs,
                "errors": r.errors,
                "misid": r.misid,
                "freq": r.freq,
                "ci_half": r.ci_half,
                "error_message": r.error_message,
            }
            for r in report.results
        ],
    }
    return json.dumps(doc, indent=2)


def report_from_json(text: str) -> ExperimentReport:
    doc = json.loads(text)
    results = tuple(
        AlgorithmResult(
            label=r["label"],
            kind=r["kind"],
            params=r["params"],
            runs=r["runs"],
            errors=r["errors"],
            misid=r["misid"],
            freq=r["freq"],
            ci_half=r["ci_half"],
            error_message=r.get("error_message", ""),
        )
        for r in doc["results"]
    )
    return ExperimentReport(
        setup=doc["setup"],
        K=doc["K"],
        T=doc["T"],
        runs=doc["runs"],
        seed=doc["seed"],
        results=results,
    )
