"""Report figures: PNG renderings of coverage and property-search results
written next to the text output."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .engine import CoverageReport, CoverageStatus
from .pbt import Exhausted, FalsificationReport, PropertyResult

_STATUS_COLORS = {
    CoverageStatus.APPLIED: "#2a9d4e",
    CoverageStatus.EVALUATED_NOT_APPLICABLE: "#6c8ebf",
    CoverageStatus.OVERRIDDEN: "#e8871e",
    CoverageStatus.NOT_REACHED: "#c7c7c7",
}

_STATUS_LABELS = {
    CoverageStatus.APPLIED: "applied",
    CoverageStatus.EVALUATED_NOT_APPLICABLE: "evaluated, not applicable",
    CoverageStatus.OVERRIDDEN: "overridden",
    CoverageStatus.NOT_REACHED: "not reached",
}


def coverage_figure(coverage: CoverageReport, path: str) -> str:
    """One row per provision in document order, colored by status."""
    rows = list(coverage.document_order)
    statuses = [coverage.status_of(pid) for pid in rows]
    height = max(3.0, 0.26 * len(rows) + 1.2)
    fig, ax = plt.subplots(figsize=(7.5, height))
    ypos = range(len(rows))
    ax.barh(
        list(ypos),
        [1.0] * len(rows),
        color=[_STATUS_COLORS[s] for s in statuses],
        edgecolor="white",
        height=0.8,
    )
    ax.set_yticks(list(ypos))
    ax.set_yticklabels([pid.render() for pid in rows], fontsize=7, family="monospace")
    ax.invert_yaxis()
    ax.set_xlim(0, 1)
    ax.set_xticks([])
    applied = sum(1 for s in statuses if s is CoverageStatus.APPLIED)
    ax.set_title(f"Provision coverage: {applied} of {len(rows)} applied", fontsize=10)
    handles = [
        plt.Rectangle((0, 0), 1, 1, color=_STATUS_COLORS[s]) for s in _STATUS_COLORS
    ]
    ax.legend(
        handles,
        [_STATUS_LABELS[s] for s in _STATUS_COLORS],
        loc="lower right",
        fontsize=7,
        framealpha=0.9,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return os.path.abspath(path)


def _falsification_axes(ax, report: FalsificationReport) -> None:
    labels = [
        f"first\nD({report.first_violation.x})",
        f"first\nD({report.first_violation.y})",
        f"shrunk\nD({report.shrunk_violation.x})",
        f"shrunk\nD({report.shrunk_violation.y})",
    ]
    amounts = [
        report.first_verdict.dx,
        report.first_verdict.dy,
        report.shrunk_verdict.dx,
        report.shrunk_verdict.dy,
    ]
    colors = ["#6c8ebf", "#d64541", "#6c8ebf", "#d64541"]
    ax.bar(labels, amounts, color=colors)
    for i, amount in enumerate(amounts):
        ax.annotate(
            f"{amount}",
            (i, amount),
            ha="center",
            va="bottom",
            fontsize=8,
        )
    lo = min(amounts)
    ax.set_ylim(max(0, lo - 500), max(amounts) + 500)
    ax.set_ylabel("deduction ($)")
    ax.set_title(
        f"Monotonicity violated after {report.iterations_run} cases "
        f"(seed {report.seed}, {report.rounding.value})",
        fontsize=10,
    )


def _exhausted_axes(ax, result: Exhausted) -> None:
    ax.bar(["cases checked"], [result.iterations_run], color="#2a9d4e")
    ax.set_title(
        f"No counterexample (seed {result.seed}, {result.rounding.value})",
        fontsize=10,
    )
    ax.set_ylabel("cases")


def _fixed_property_axes(ax, result: PropertyResult) -> None:
    color = "#2a9d4e" if result.passed else "#d64541"
    ax.bar(["samples run"], [result.samples_run], color=color)
    word = "pass" if result.passed else "FAIL"
    ax.set_title(f"{result.name}: {word} (seed {result.seed})", fontsize=10)
    ax.set_ylabel("samples")
    if not result.passed:
        ax.annotate(
            "\n".join(result.witnesses),
            (0.5, 0.5),
            xycoords="axes fraction",
            ha="center",
            fontsize=7,
            wrap=True,
        )


def property_figure(
    result: FalsificationReport | Exhausted | PropertyResult, path: str
) -> str:
    """A one-panel summary of a property campaign outcome."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if isinstance(result, FalsificationReport):
        _falsification_axes(ax, result)
    elif isinstance(result, Exhausted):
        _exhausted_axes(ax, result)
    else:
        _fixed_property_axes(ax, result)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return os.path.abspath(path)
