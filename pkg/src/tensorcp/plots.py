"""Figure rendering for suite reports.

Imported lazily by the CLI so matplotlib never loads on the fast paths.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["render_suite_figure", "render_summary_figure"]


def render_suite_figure(report, path) -> None:
    """Bar chart of passed/failed trials for one suite report."""
    fig, ax = plt.subplots(figsize=(4.0, 3.0))
    passed = report.trials - report.failures
    bars = ax.bar(["passed", "failed"], [passed, report.failures], color=["#2a9d3a", "#c23b22"])
    ax.bar_label(bars)
    ax.set_ylim(0, max(report.trials, 1) * 1.15)
    ax.set_ylabel("trials")
    ax.set_title(f"suite {report.suite} (seed {report.seed})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_summary_figure(reports, path) -> None:
    """Failures per suite across a multi-suite run."""
    names = [r.suite for r in reports]
    failures = [r.failures for r in reports]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(names) + 1.5), 3.0))
    bars = ax.bar(names, failures, color="#c23b22")
    ax.bar_label(bars)
    ax.set_ylabel("failures")
    ax.set_ylim(0, max(failures + [1]) * 1.2)
    ax.set_title("suite failures")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
