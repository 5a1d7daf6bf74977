"""Command-line front end for experiments, bounds, and the p advisor.

Configuration comes from flags, optionally seeded by a JSON config file
(flags win).  Human-readable summaries go to stdout; machine output goes
to ``--out`` as JSON or CSV.  Exit codes: 0 success, 2 bad configuration,
3 runtime failure.  The default seed is 0, or $SEQELIM_SEED if set;
``--seed`` overrides both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .complexity import (
    advise_p,
    c_p,
    classify_regime,
    h1,
    h2,
    h_p,
    logbar,
    nseqel_bound,
    decay_envelope,
)
from .env import gaps, make_env
from .harness import (
    AlgorithmSpec,
    default_bench_algorithms,
    exact_misid_probability,
    make_setup,
    report_to_csv,
    report_to_json,
    run_block_experiment,
    run_experiment,
    setup_budget,
    summarize_ratios,
)
from .sideobs import block_schedule_power, equal_blocks, make_partition

SEED_ENV_VAR = "SEQELIM_SEED"


class ConfigError(ValueError):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"${SEED_ENV_VAR}={raw!r} is not an integer") from exc


def _add_env_args(sub):
    sub.add_argument("--setup", help="canonical setup id, e.g. setup1 or geo7")
    sub.add_argument("--k", type=int, help="arm count for the chosen setup")
    sub.add_argument(
        "--means", help="comma-separated explicit means, e.g. 0.7,0.6,0.5"
    )


def _resolve_env(args):
    if bool(args.setup) == bool(args.means):
        raise ConfigError("provide exactly one of --setup or --means")
    if args.setup:
        setup = args.setup if not args.setup.isdigit() else f"setup{args.setup}"
        return make_setup(setup, args.k), setup
    means = [float(x) for x in args.means.split(",")]
    return make_env(means), "custom"


def _parse_algorithms(specs: list[str]) -> list[AlgorithmSpec]:
    out = []
    for raw in specs:
        name, _, arg = raw.partition(":")
        name = name.strip().lower()
        if name == "nseqel":
            out.append(AlgorithmSpec("nseqel", p=float(arg)))
        elif name in ("succ-rej", "seq-halve"):
            out.append(AlgorithmSpec(name))
        elif name == "ucb-e":
            key, _, val = arg.partition("=")
            if key == "a":
                out.append(AlgorithmSpec("ucb-e", a=float(val)))
            elif key == "c":
                out.append(AlgorithmSpec("ucb-e", c=float(val)))
            else:
                raise ConfigError(f"ucb-e takes c=<x> or a=<x>, got {arg!r}")
        else:
            raise ConfigError(f"unknown algorithm {raw!r}")
    return out


def _parse_partition(text: str, K: int):
    if "x" in text:
        size_s, _, count_s = text.partition("x")
        size, count = int(size_s), int(count_s)
        if size * count != K:
            raise ConfigError(f"partition {text!r} covers {size * count} arms, K={K}")
        return equal_blocks(K, size)
    sizes = [int(s) for s in text.split(",")]
    if sum(sizes) != K:
        raise ConfigError(f"partition sizes sum to {sum(sizes)}, K={K}")
    blocks, at = [], 0
    for s in sizes:
        blocks.append(tuple(range(at, at + s)))
        at += s
    return make_partition(blocks)


def _write_report(report, args):
    fmt = args.format
    if args.out:
        if fmt == "csv" or (fmt == "auto" and args.out.endswith(".csv")):
            payload = report_to_csv(report)
        else:
            payload = report_to_json(report)
        with open(args.out, "w") as fh:
            fh.write(payload)
        print(f"wrote {args.out}")


def _print_report(report):
    print(f"setup={report.setup} K={report.K} T={report.T} runs={report.runs} seed={report.seed}")
    for r in report.results:
        if r.errors:
            print(f"  {r.label:<18} ERROR {r.error_message}")
        else:
            print(f"  {r.label:<18} freq={r.freq:.6f} ci95={r.ci_half:.6f}")


def cmd_run(args) -> int:
    env, setup = _resolve_env(args)
    if not args.algo:
        raise ConfigError("need at least one --algo")
    algos = _parse_algorithms(args.algo)
    T = args.t if args.t is not None else setup_budget(env)
    report = run_experiment(
        env, algos, T, args.runs, args.seed, parallelism=args.parallelism, setup=setup
    )
    _print_report(report)
    if args.baseline:
        for entry in summarize_ratios(report, args.baseline):
            shown = f"{entry.ratio:.3f}" if entry.defined else "undefined"
            print(f"  ratio {args.baseline}/{entry.label} = {shown}")
    _write_report(report, args)
    return 0


def cmd_bench(args) -> int:
    env, setup = _resolve_env(args)
    T = args.t if args.t is not None else setup_budget(env)
    report = run_experiment(
        env,
        default_bench_algorithms(),
        T,
        args.runs,
        args.seed,
        parallelism=args.parallelism,
        setup=setup,
    )
    _print_report(report)
    _write_report(report, args)
    return 0


def cmd_bound(args) -> int:
    env, _ = _resolve_env(args)
    gv = gaps(env)
    K = env.K
    T = args.t if args.t is not None else setup_budget(env)
    p_values = [float(x) for x in args.p.split(",")]
    print(f"K={K} T={T}")
    print(f"H1      = {h1(gv):.6g}")
    print(f"H2      = {h2(gv):.6g}")
    print(f"logbarK = {logbar(K):.6g}")
    for p in p_values:
        print(f"H({p:g}) = {h_p(gv, p):.6g}   C_{p:g} = {c_p(K, p):.6g}")
    for tag in ("succ-rej", "seq-halve"):
        spec = decay_envelope(tag, gv)
        print(
            f"{tag:<10} alpha={spec.alpha:.6g} beta={spec.beta:.6g} "
            f"bound(T)={spec(T):.6g}"
        )
    for p in p_values:
        spec = decay_envelope("nseqel", gv, p=p)
        exact = nseqel_bound(gv, p)(T)
        print(
            f"nseqel p={p:<5g} alpha={spec.alpha:.6g} beta={spec.beta:.6g} "
            f"bound(T)={spec(T):.6g} exact={exact:.6g}"
        )
    regime = classify_regime(gv)
    print(f"regime: {regime.regime} (f_K={regime.f_K}, eps={regime.epsilon})")
    return 0


def cmd_advise_p(args) -> int:
    f_K = args.f_k
    if f_K is None:
        if args.gamma is None:
            raise ConfigError("provide --f-k or --gamma")
        f_K = args.k**args.gamma
    interval = advise_p(args.k, f_K)
    lo = "(" if interval.lower_open else "["
    hi = ")" if interval.upper_open else "]"
    print(
        f"K={args.k} f_K={f_K:g}: p in {lo}{interval.lower:.2f}, "
        f"{interval.upper:.2f}{hi}  [{interval.regime}] "
        f"suggestion p={interval.suggestion:.2f}"
    )
    return 0


def cmd_block(args) -> int:
    env, setup = _resolve_env(args)
    part = _parse_partition(args.partition, env.K)
    T = args.t if args.t is not None else setup_budget(env)
    bsched = block_schedule_power(part.M, T, args.p)
    report = run_block_experiment(
        env, part, bsched, args.runs, args.seed, setup=setup
    )
    _print_report(report)
    _write_report(report, args)
    return 0


def cmd_oracle(args) -> int:
    env, _ = _resolve_env(args)
    algos = _parse_algorithms([args.algo])
    T = args.t if args.t is not None else setup_budget(env)
    result = exact_misid_probability(env, algos[0], T)
    print(
        f"exact misidentification probability = {result.probability:.12g} "
        f"(enumerated {result.enumeration_size} states)"
    )
    return 0


def _apply_config_file(argv: list[str]) -> list[str]:
    # Pull --config FILE out, translate its key/value pairs into leading
    # flags so explicit command-line flags override them.
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    path = argv[at + 1]
    rest = argv[:at] + argv[at + 2 :]
    with open(path) as fh:
        conf = json.load(fh)
    injected = []
    for key, value in conf.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                injected.append(flag)
        elif isinstance(value, list):
            for item in value:
                injected.extend([flag, str(item)])
        else:
            injected.extend([flag, str(value)])
    return rest[:1] + injected + rest[1:]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqelim",
        description="Fixed-budget best-arm identification experiments",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    def common(sub, env_args=True):
        if env_args:
            _add_env_args(sub)
        sub.add_argument("--t", type=int, help="budget override (default ceil(H1))")
        sub.add_argument("--runs", type=int, default=4000)
        sub.add_argument("--seed", type=int, default=_default_seed())
        sub.add_argument("--parallelism", type=int, default=1)
        sub.add_argument("--out", help="write machine-readable report here")
        sub.add_argument(
            "--format", choices=("auto", "json", "csv"), default="auto"
        )

    sub = subs.add_parser("run", help="run chosen algorithms on one instance")
    common(sub)
    sub.add_argument(
        "--algo",
        action="append",
        help="nseqel:<p> | succ-rej | seq-halve | ucb-e:c=<x> | ucb-e:a=<x>",
    )
    sub.add_argument("--baseline", help="label for ratio summaries")
    sub.set_defaults(func=cmd_run)

    sub = subs.add_parser("bench", help="run the standard nine-algorithm roster")
    common(sub)
    sub.set_defaults(func=cmd_bench)

    sub = subs.add_parser("bound", help="print complexity measures and bounds")
    _add_env_args(sub)
    sub.add_argument("--t", type=int)
    sub.add_argument("--p", default="0.75,1,1.35,1.7,2")
    sub.set_defaults(func=cmd_bound)

    sub = subs.add_parser("advise-p", help="advised exponent range")
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--f-k", dest="f_k", type=float)
    sub.add_argument("--gamma", type=float, help="use f_K = K**gamma")
    sub.set_defaults(func=cmd_advise_p)

    sub = subs.add_parser("block", help="block elimination with side observations")
    common(sub)
    sub.add_argument(
        "--partition",
        required=True,
        help="SIZExCOUNT (e.g. 10x4) or comma sizes (e.g. 5,3,2)",
    )
    sub.add_argument("--p", type=float, default=1.0, help="block schedule exponent")
    sub.set_defaults(func=cmd_block)

    sub = subs.add_parser("oracle", help="exact misidentification probability")
    _add_env_args(sub)
    sub.add_argument("--t", type=int)
    sub.add_argument("--algo", required=True)
    sub.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(argv)
        args = parser.parse_args(argv)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
