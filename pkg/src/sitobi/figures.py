"""Figure rendering for evaluation reports.

Each report kind gets one figure, written next to the delimited report
file: an error histogram for segmentation, a confusion-matrix heatmap
for break indices, and a per-label accuracy bar chart for contours.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .evaluate import EvaluationReport


def render_histogram(report: EvaluationReport, path) -> None:
    edges = report.histogram_edges_ms
    counts = report.histogram_counts
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(edges[:-1], counts, width=edges[1] - edges[0], align="edge",
           color="#4878a8", edgecolor="white")
    ax.set_xlabel("absolute duration error (ms)")
    ax.set_ylabel("phone count")
    ax.set_title("Segmentation error distribution (n=%d)" % report.n_items)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_confusion(report: EvaluationReport, path) -> None:
    matrix = report.confusion
    values = report.confusion_values
    fig, ax = plt.subplots(figsize=(4.5, 4))
    image = ax.imshow(matrix, cmap="Blues")
    ax.set_xticks(range(len(values)), [str(v) for v in values])
    ax.set_yticks(range(len(values)), [str(v) for v in values])
    ax.set_xlabel("hypothesis")
    ax.set_ylabel("reference")
    ax.set_title("Break index confusion (%.1f%% correct)" % report.accuracy)
    threshold = matrix.max() / 2 if matrix.max() else 0
    for i in range(len(values)):
        for j in range(len(values)):
            color = "white" if matrix[i, j] > threshold else "black"
            ax.text(j, i, str(int(matrix[i, j])), ha="center", va="center", color=color)
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_per_label(report: EvaluationReport, path) -> None:
    labels = list(report.per_label_accuracy)
    values = [report.per_label_accuracy[l] for l in labels]
    fig, ax = plt.subplots(figsize=(max(6, 0.35 * len(labels)), 4))
    ax.bar(range(len(labels)), values, color="#4878a8")
    ax.set_xticks(range(len(labels)), labels, rotation=60, ha="right", fontsize=8)
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 105)
    ax.set_title("Contour label accuracy (overall %.1f%%)" % report.accuracy)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report_figures(report: EvaluationReport, report_path) -> list[str]:
    """Render the figures for a report next to its delimited file."""
    stem, _ = os.path.splitext(os.fspath(report_path))
    written = []
    if report.kind == "segmentation" and report.histogram_counts is not None:
        out = stem + "_histogram.png"
        render_histogram(report, out)
        written.append(out)
    if report.confusion is not None:
        out = stem + "_confusion.png"
        render_confusion(report, out)
        written.append(out)
    if report.per_label_accuracy:
        out = stem + "_labels.png"
        render_per_label(report, out)
        written.append(out)
    return written
