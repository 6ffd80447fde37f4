"""Report figures.

Rendered headlessly next to the delimited output when the driver is
asked for them; the report JSON stays the authoritative artifact.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _counts_figure(report: dict, path: str) -> None:
    rows = report["records"]
    labels = [f"{r['check']}\n{r['level']}/{r['stage']}" for r in rows]
    counts = [r["checked"] for r in rows]
    colors = ["#c0392b" if r["failure_count"] else "#27ae60" for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 0.7 * len(rows)), 4.5))
    ax.bar(range(len(rows)), counts, color=colors)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("instances checked")
    ax.set_title("verification coverage per check record")
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _status_figure(report: dict, path: str) -> None:
    rows = report["records"]
    by_check: dict[str, list[int]] = {}
    for r in rows:
        cell = by_check.setdefault(r["check"], [0, 0, 0])
        cell[0] += r["checked"]
        cell[1] += r["failure_count"]
        cell[2] += 1 if r["capped"] else 0
    names = list(by_check)
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = range(len(names))
    ax.bar(xs, [by_check[n][0] for n in names], label="checked", color="#2980b9")
    ax.bar(xs, [by_check[n][1] for n in names], label="failures", color="#c0392b")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_yscale("symlog")
    ax.legend(frameon=False)
    ax.set_title("totals by check")
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(report: dict, outdir: str) -> list[str]:
    """Write the report's figures into outdir; returns the file paths."""
    os.makedirs(outdir, exist_ok=True)
    coverage = os.path.join(outdir, "coverage.png")
    totals = os.path.join(outdir, "totals.png")
    _counts_figure(report, coverage)
    _status_figure(report, totals)
    return [coverage, totals]
