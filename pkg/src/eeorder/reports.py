"""Report emission: CSV and aligned-text tables, with matplotlib figures
rendered to files alongside the delimited output."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import ImportancePoint  # noqa: E402
from .tagging import TagMetrics  # noqa: E402


def write_rows_csv(rows: Sequence[dict], path: str | Path,
                   columns: Sequence[str] | None = None) -> Path:
    path = Path(path)
    if not rows:
        path.write_text("", encoding="utf-8")
        return path
    cols = list(columns) if columns else list(rows[0])
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=cols, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    return path


def format_table(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    """Aligned plain-text table; every value is str()-ed."""
    if not rows:
        return "(no rows)\n"
    cols = list(columns) if columns else list(rows[0])
    cells = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)),
             "  ".join("-" * w for w in widths)]
    lines.extend("  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells)
    return "\n".join(lines) + "\n"


def write_table(rows: Sequence[dict], path: str | Path,
                columns: Sequence[str] | None = None) -> Path:
    path = Path(path)
    path.write_text(format_table(rows, columns), encoding="utf-8")
    return path


def render_accuracy_bars(rows: Sequence[dict], path: str | Path,
                         title: str = "Classification accuracy") -> Path:
    """One bar per (classifier, feature set) row, grouped by classifier."""
    path = Path(path)
    labels = [f"{r['classifier']}\n{r['features']}" for r in rows]
    accs = [float(r["accuracy"]) for r in rows]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(rows)), 3.6))
    ax.bar(range(len(rows)), accs, color="#4878b0")
    ax.axhline(0.5, color="gray", linestyle="--", linewidth=1, label="chance")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("accuracy")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_confusion(cm: np.ndarray, tags: Sequence[str], path: str | Path,
                     title: str = "Tag confusion") -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(4.2, 3.8))
    im = ax.imshow(np.asarray(cm), cmap="Blues")
    ax.set_xticks(range(len(tags)))
    ax.set_xticklabels(tags, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(len(tags)))
    ax.set_yticklabels(tags, fontsize=8)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    ax.set_title(title)
    for i in range(len(tags)):
        for j in range(len(tags)):
            v = int(cm[i, j])
            if v:
                ax.text(j, i, str(v), ha="center", va="center", fontsize=7,
                        color="white" if cm[i, j] > cm.max() / 2 else "black")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def write_confusion_csv(cm: np.ndarray, tags: Sequence[str], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["gold\\pred", *tags])
        for tag, row in zip(tags, np.asarray(cm)):
            writer.writerow([tag, *[int(v) for v in row]])
    return path


def tag_metrics_rows(metrics: TagMetrics, model: str) -> list[dict]:
    return [{"model": model, "level": "token",
             "precision": round(metrics.token_precision, 4),
             "recall": round(metrics.token_recall, 4),
             "f1": round(metrics.token_f1, 4)},
            {"model": model, "level": "span",
             "precision": round(metrics.span_precision, 4),
             "recall": round(metrics.span_recall, 4),
             "f1": round(metrics.span_f1, 4)}]


def render_importance_curve(points: Sequence[ImportancePoint],
                            natural: dict[str, float], path: str | Path) -> Path:
    """Stacked feature-type shares of the top-k features against k (log scale),
    dashed lines at the natural block shares, test accuracy annotated on top."""
    path = Path(path)
    order = ("tone", "rhyme", "onset", "embedding")
    colors = {"tone": "#d1605e", "rhyme": "#e7a13d", "onset": "#6aa56e",
              "embedding": "#5f9ac1"}
    ks = [p.k for p in points]
    shares = np.array([[p.proportions[t] for p in points] for t in order])
    fig, ax = plt.subplots(figsize=(5.4, 3.8))
    ax.stackplot(ks, shares, labels=order, colors=[colors[t] for t in order],
                 alpha=0.85)
    for t in order:
        ax.axhline(natural[t], color=colors[t], linestyle="--", linewidth=1)
    ax.set_xscale("log")
    ax.set_xlabel("top k features")
    ax.set_ylabel("share of top-k features")
    ax.set_ylim(0, 1)
    for p in points:
        ax.annotate(f"{p.test_accuracy:.2f}", (p.k, 1.0), xytext=(0, 3),
                    textcoords="offset points", ha="center", fontsize=6)
    ax.legend(loc="center right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_overlap_box(per_test: Sequence[tuple[str, int, int, int, int]],
                       path: str | Path) -> Path:
    """Box plot of per-test-pair training occurrences, same order vs reversed."""
    path = Path(path)
    same_ee = [r[1] for r in per_test]
    rev_ee = [r[2] for r in per_test]
    same_cc = [r[3] for r in per_test]
    rev_cc = [r[4] for r in per_test]
    fig, ax = plt.subplots(figsize=(4.6, 3.6))
    data = [same_ee, rev_ee, same_cc, rev_cc]
    ax.boxplot(data, tick_labels=["EE same", "EE rev.", "CC same", "CC rev."])
    ax.set_ylabel("occurrences in training data")
    ax.set_title("Component overlap per test pair")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
