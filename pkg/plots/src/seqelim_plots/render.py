"""Render grouped bar charts from benchmark CSV files.

Consumes the fixed experiment CSV schema
(setup,K,T,runs,alg,params,errors,freq,ci_half,seed), one chart panel per
group, one bar per algorithm in the standard index order with ci_half as
error whiskers.  Bar heights are the freq column verbatim; nothing is
recomputed.  SVG output is byte-stable for fixed input.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

REQUIRED_COLUMNS = (
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

# Standard bar order: nonlinear elimination at rising exponents, then the
# two fixed eliminations, then the optimism baseline at rising multipliers.
BAR_ORDER = (
    ("nseqel", "p=0.75"),
    ("nseqel", "p=1.35"),
    ("nseqel", "p=1.7"),
    ("nseqel", "p=2"),
    ("succ-rej", ""),
    ("seq-halve", ""),
    ("ucb-e", "c=1"),
    ("ucb-e", "c=2"),
    ("ucb-e", "c=4"),
)

_COLORS = plt.get_cmap("tab10").colors


class PlotInputError(ValueError):
    """Missing columns, empty input, or unusable rows."""


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: input CSVs, panel grouping, output path, title."""

    inputs: tuple[str, ...]
    out: str
    group_by: tuple[str, ...] = ("setup", "K")
    title: str = "misidentification probability ({group})"


@dataclass(frozen=True)
class Bar:
    label: str
    index: int
    height: float
    whisker: float


@dataclass(frozen=True)
class Panel:
    group: str
    bars: tuple[Bar, ...]


@dataclass(frozen=True)
class RenderResult:
    out: str
    panels: tuple[Panel, ...] = field(default_factory=tuple)


def _bar_label(alg: str, params: str) -> str:
    return f"{alg}({params})" if params else alg


def _bar_index(alg: str, params: str) -> int:
    try:
        return BAR_ORDER.index((alg, params))
    except ValueError:
        return len(BAR_ORDER)


def read_rows(paths) -> list[dict]:
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise PlotInputError(f"{path}: missing columns {missing}")
            for row in reader:
                rows.append(row)
    if not rows:
        raise PlotInputError("no data rows in input")
    return rows


def _panels(rows, group_by) -> list[Panel]:
    grouped: dict[str, list[dict]] = {}
    for row in rows:
        key = " ".join(f"{g}={row[g]}" for g in group_by)
        grouped.setdefault(key, []).append(row)
    panels = []
    for key in sorted(grouped):
        bars = []
        for row in grouped[key]:
            if row["errors"] not in ("", "0"):
                continue
            bars.append(
                Bar(
                    label=_bar_label(row["alg"], row["params"]),
                    index=_bar_index(row["alg"], row["params"]),
                    height=float(row["freq"]),
                    whisker=float(row["ci_half"]),
                )
            )
        bars.sort(key=lambda b: (b.index, b.label))
        if bars:
            panels.append(Panel(group=key, bars=tuple(bars)))
    if not panels:
        raise PlotInputError("no plottable rows (all rows carry errors)")
    return panels


def render(spec: PlotSpec) -> RenderResult:
    """Draw the chart and write ``spec.out``; returns the plotted values.

    The output file is written only after every panel validates, and SVG
    output carries no timestamp, so identical input gives identical bytes.
    """
    rows = read_rows(spec.inputs)
    panels = _panels(rows, spec.group_by)

    ncols = min(2, len(panels))
    nrows = (len(panels) + ncols - 1) // ncols
    with plt.rc_context({"svg.hashsalt": "seqelim-plots"}):
        fig, axes = plt.subplots(
            nrows, ncols, figsize=(5.5 * ncols, 3.2 * nrows), squeeze=False
        )
        for slot, panel in enumerate(panels):
            ax = axes[slot // ncols][slot % ncols]
            xs = range(1, len(panel.bars) + 1)
            heights = [b.height for b in panel.bars]
            whiskers = [b.whisker for b in panel.bars]
            colors = [_COLORS[b.index % len(_COLORS)] for b in panel.bars]
            ax.bar(
                xs,
                heights,
                yerr=whiskers,
                color=colors,
                capsize=2,
                error_kw={"linewidth": 0.8},
            )
            ax.set_xticks(list(xs))
            ax.set_xticklabels([str(x) for x in xs])
            ax.set_title(spec.title.format(group=panel.group), fontsize=9)
            ax.set_ylabel("frequency", fontsize=8)
            ax.tick_params(labelsize=7)
        for slot in range(len(panels), nrows * ncols):
            axes[slot // ncols][slot % ncols].set_axis_off()
        handles = [
            plt.Rectangle((0, 0), 1, 1, color=_COLORS[i % len(_COLORS)])
            for i in range(len(BAR_ORDER))
        ]
        labels = [
            f"{i + 1}: {_bar_label(alg, params)}"
            for i, (alg, params) in enumerate(BAR_ORDER)
        ]
        fig.legend(handles, labels, loc="lower center", ncol=3, fontsize=7)
        fig.tight_layout(rect=(0, 0.16, 1, 1))
        fig.savefig(spec.out, metadata=_stable_metadata(spec.out))
        plt.close(fig)
    return RenderResult(out=spec.out, panels=tuple(panels))


def _stable_metadata(path: str) -> dict:
    if path.endswith(".svg"):
        return {"Date": None}
    if path.endswith(".png"):
        return {"Software": None}
    return {}
