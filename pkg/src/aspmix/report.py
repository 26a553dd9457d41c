"""Benchmark report: JSON summary, plain-text table and figures."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sim.bench import BenchmarkSummary  # noqa: E402

LABELS = {"mixed": "Mixed", "asp": "ASP only", "prob": "Prob. greedy"}


def accuracy_figure(summary: BenchmarkSummary, path: Path) -> Path:
    archs = list(summary.architectures)
    acc = [summary.per_arch[a]["accuracy"] for a in archs]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.bar([LABELS.get(a, a) for a in archs], acc, color=["#4c72b0", "#dd8452", "#55a868"][:len(archs)])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("task accuracy")
    ax.set_title(f"Accuracy over {summary.n} paired trials")
    for k, v in enumerate(acc):
        ax.text(k, v + 0.02, f"{v:.2f}", ha="center", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def time_figure(summary: BenchmarkSummary, path: Path) -> Path:
    """Per-pair simulated-time ratios against the mixed architecture."""
    archs = list(summary.architectures)
    base = {t.group: t for t in summary.trials if t.architecture == "mixed"}
    data = []
    for a in archs:
        ratios = [t.ticks / base[t.group].ticks for t in summary.trials
                  if t.architecture == a and t.success and t.group in base
                  and base[t.group].success and base[t.group].ticks > 0]
        data.append(ratios or [float("nan")])
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.boxplot(data, showfliers=False)
    ax.set_xticks(range(1, len(archs) + 1), [LABELS.get(a, a) for a in archs])
    ax.axhline(1.0, color="grey", lw=0.8, ls="--")
    ax.set_ylabel("time factor vs mixed")
    ax.set_title("Simulated time (ticks), paired")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(summary: BenchmarkSummary, out_dir) -> dict:
    """Write ``summary.json``, ``summary.txt`` and two PNG figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "json": out / "summary.json",
        "table": out / "summary.txt",
        "accuracy": out / "accuracy.png",
        "time": out / "time_factor.png",
    }
    files["json"].write_text(json.dumps(summary.to_json(), indent=2) + "\n")
    files["table"].write_text(summary.table() + "\n")
    accuracy_figure(summary, files["accuracy"])
    time_figure(summary, files["time"])
    return {k: str(v) for k, v in files.items()}
