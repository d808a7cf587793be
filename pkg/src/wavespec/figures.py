"""Matplotlib renderings of size reports and mined specifications.

Figures are drawn through the object-oriented API (no pyplot, no global
backend state) so headless CI runners render them without a display.
"""

from __future__ import annotations

import os
from collections import Counter

from .mining import Specification
from .report import SizeReport


def plot_size_report(report: SizeReport, out_path: str) -> str:
    """Render lines/words/bytes per file as grouped log-scale bars."""
    from matplotlib.figure import Figure

    fig = Figure(figsize=(7.0, 4.2))
    ax = fig.add_subplot(111)
    labels = [os.path.basename(s.path) for s in report]
    series = {
        "lines": [s.lines for s in report],
        "words": [s.words for s in report],
        "bytes": [s.size for s in report],
    }
    width = 0.26
    for k, (name, values) in enumerate(series.items()):
        xs = [i + (k - 1) * width for i in range(len(labels))]
        ax.bar(xs, [max(v, 1) for v in values], width=width, label=name)
    ax.set_yscale("log")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("count (log scale)")
    ax.set_title("trace data sizes")
    ax.legend(frameon=False)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    return out_path


def plot_invariant_kinds(spec: Specification, out_path: str) -> str:
    """Render the surviving-invariant count per kind."""
    from matplotlib.figure import Figure

    counts = Counter(inv.kind.name.lower() for inv in spec.invariants)
    fig = Figure(figsize=(7.0, 4.2))
    ax = fig.add_subplot(111)
    names = sorted(counts, key=counts.get, reverse=True)
    ax.bar(range(len(names)), [counts[n] for n in names], color="#4878a8")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=25, ha="right")
    ax.set_ylabel("surviving invariants")
    ax.set_title(f"{spec.ppt_name}: {spec.survivor_count} invariants "
                 f"over {spec.sample_count} samples")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    return out_path
