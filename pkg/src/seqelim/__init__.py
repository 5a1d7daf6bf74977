"""Fixed-budget best-arm identification toolkit.

Sequential elimination algorithms (including nonlinear budget allocation
and halving), an optimism baseline, block elimination with star-graph side
observations, problem-complexity measures with misidentification bounds, a
p-tuning advisor, and a reproducible Monte-Carlo benchmark harness.
"""

from .env import (
    ARM_STRIDE,
    ArmSampleAccumulator,
    BanditEnv,
    GapVector,
    NoUniqueBestArmError,
    RewardStreams,
    RngStream,
    gaps,
    make_env,
    sample,
)
from .schedule import (
    EliminationSchedule,
    ScheduleSpec,
    build_schedule,
    nseqel_schedule,
    verify_budget,
)
from .algorithms import (
    RoundRecord,
    RunRecord,
    run_general_elimination,
    run_nseqel,
    run_seq_halve,
    run_succ_rej,
    run_ucb_e,
    seq_halve_plan,
)
from .complexity import (
    BoundSpec,
    ComplexityReport,
    PInterval,
    RegimeSpec,
    advise_p,
    c_p,
    classify_regime,
    complexity_report,
    h1,
    h2,
    h_p,
    logbar,
    nseqel_bound,
    decay_envelope,
    elimination_bound,
)
from .sideobs import (
    BlockPartition,
    BlockSchedule,
    block_schedule_power,
    equal_blocks,
    make_partition,
    run_block_elimination,
    block_elimination_bound,
)
from .harness import (
    AlgorithmResult,
    AlgorithmSpec,
    EnumerationLimitError,
    ExactOracleResult,
    ExperimentReport,
    RatioEntry,
    default_bench_algorithms,
    exact_misid_probability,
    make_setup,
    report_from_json,
    report_to_csv,
    report_to_json,
    run_block_experiment,
    run_experiment,
    setup_budget,
    summarize_ratios,
)

__version__ = "0.1.0"
