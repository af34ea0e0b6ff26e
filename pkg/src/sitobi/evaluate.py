"""Scoring hypothesis annotations against references.

Segmentation is scored by per-phone duration and boundary errors with a
10 ms histogram; break indices by accuracy and a 3x3 confusion matrix;
contour labels by overall and per-label accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DocumentError
from .pitch import ContourLabel
from .segments import BreakIndex, PhonemeSegment

HISTOGRAM_BIN_MS = 10.0
ERROR_THRESHOLDS_MS = (10.0, 20.0, 30.0)
BREAK_VALUES = (1, 2, 3)


@dataclass
class EvaluationReport:
    """One tier's scores; only the fields for its kind are populated."""

    kind: str
    n_items: int = 0
    duration_errors_ms: np.ndarray | None = None
    boundary_errors_ms: np.ndarray | None = None
    histogram_edges_ms: np.ndarray | None = None
    histogram_counts: np.ndarray | None = None
    pct_within: dict[float, float] = field(default_factory=dict)
    accuracy: float | None = None
    confusion: np.ndarray | None = None
    confusion_values: tuple = ()
    per_label_accuracy: dict[str, float] = field(default_factory=dict)
    per_label_counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def validate(self) -> None:
        if self.accuracy is not None and not 0.0 <= self.accuracy <= 100.0:
            raise DocumentError("accuracy %r outside [0, 100]" % self.accuracy)
        for pct in self.pct_within.values():
            if not 0.0 <= pct <= 100.0:
                raise DocumentError("percentage %r outside [0, 100]" % pct)


def _durations_ms(segments) -> np.ndarray:
    return np.array([(s.end - s.start) * 1000.0 for s in segments])


def evaluate_segmentation(
    hyp: list[PhonemeSegment], ref: list[PhonemeSegment]
) -> EvaluationReport:
    """Duration and boundary error statistics over matched phone lists."""
    if len(hyp) != len(ref):
        raise DocumentError(
            "segment count mismatch: %d hypothesis vs %d reference" % (len(hyp), len(ref))
        )
    if not hyp:
        raise DocumentError("nothing to evaluate")
    for i, (h, r) in enumerate(zip(hyp, ref)):
        if h.phone.label != r.phone.label:
            raise DocumentError(
                "phone %d differs: %r vs %r" % (i, h.phone.label, r.phone.label)
            )
    dur_err = np.abs(_durations_ms(hyp) - _durations_ms(ref))
    bound_err = np.array([abs(h.end - r.end) * 1000.0 for h, r in zip(hyp, ref)])

    top = max(float(dur_err.max()), HISTOGRAM_BIN_MS)
    edges = np.arange(0.0, top + HISTOGRAM_BIN_MS, HISTOGRAM_BIN_MS)
    counts, edges = np.histogram(dur_err, bins=edges)
    pct = {
        t: 100.0 * float(np.mean(dur_err < t)) for t in ERROR_THRESHOLDS_MS
    }
    report = EvaluationReport(
        kind="segmentation",
        n_items=len(hyp),
        duration_errors_ms=dur_err,
        boundary_errors_ms=bound_err,
        histogram_edges_ms=edges,
        histogram_counts=counts,
        pct_within=pct,
    )
    report.validate()
    return report


def _break_value(item) -> int:
    return item.value if isinstance(item, BreakIndex) else int(item)


def evaluate_breaks(hyp, ref) -> EvaluationReport:
    """Accuracy and confusion matrix over aligned break index lists."""
    if len(hyp) != len(ref):
        raise DocumentError(
            "break count mismatch: %d hypothesis vs %d reference" % (len(hyp), len(ref))
        )
    if not hyp:
        raise DocumentError("nothing to evaluate")
    hyp_v = [_break_value(b) for b in hyp]
    ref_v = [_break_value(b) for b in ref]
    confusion = np.zeros((3, 3), dtype=int)
    for h, r in zip(hyp_v, ref_v):
        confusion[r - 1, h - 1] += 1
    accuracy = 100.0 * float(np.trace(confusion)) / len(ref_v)
    report = EvaluationReport(
        kind="breaks",
        n_items=len(ref_v),
        accuracy=accuracy,
        confusion=confusion,
        confusion_values=BREAK_VALUES,
    )
    report.validate()
    return report


def _label_text(item) -> str:
    text = str(item)
    ContourLabel.parse(text)
    return text


def evaluate_pitch_labels(hyp, ref) -> EvaluationReport:
    """Overall and per-label accuracy over aligned contour label lists."""
    if len(hyp) != len(ref):
        raise DocumentError(
            "label count mismatch: %d hypothesis vs %d reference" % (len(hyp), len(ref))
        )
    if not hyp:
        raise DocumentError("nothing to evaluate")
    hyp_l = [_label_text(x) for x in hyp]
    ref_l = [_label_text(x) for x in ref]
    counts: dict[str, list[int]] = {}
    correct = 0
    for h, r in zip(hyp_l, ref_l):
        bucket = counts.setdefault(r, [0, 0])
        bucket[1] += 1
        if h == r:
            bucket[0] += 1
            correct += 1
    report = EvaluationReport(
        kind="pitch",
        n_items=len(ref_l),
        accuracy=100.0 * correct / len(ref_l),
        per_label_accuracy={
            label: 100.0 * c / n for label, (c, n) in sorted(counts.items())
        },
        per_label_counts={label: (c, n) for label, (c, n) in sorted(counts.items())},
    )
    report.validate()
    return report


def report_to_tsv(report: EvaluationReport) -> str:
    """Delimited form of a report: scalar rows, then matrix sections."""
    lines = ["metric\tvalue", "kind\t%s" % report.kind, "n_items\t%d" % report.n_items]
    if report.accuracy is not None:
        lines.append("accuracy_pct\t%.4f" % report.accuracy)
    for threshold in sorted(report.pct_within):
        lines.append(
            "pct_within_%dms\t%.4f" % (int(threshold), report.pct_within[threshold])
        )
    if report.duration_errors_ms is not None and report.duration_errors_ms.size:
        err = report.duration_errors_ms
        lines.append("mean_duration_error_ms\t%.4f" % float(err.mean()))
        lines.append("median_duration_error_ms\t%.4f" % float(np.median(err)))
        lines.append("max_duration_error_ms\t%.4f" % float(err.max()))
    if report.histogram_counts is not None:
        lines.append("")
        lines.append("bin_lo_ms\tbin_hi_ms\tcount")
        for i, count in enumerate(report.histogram_counts):
            lines.append(
                "%.1f\t%.1f\t%d"
                % (report.histogram_edges_ms[i], report.histogram_edges_ms[i + 1], count)
            )
    if report.confusion is not None:
        lines.append("")
        lines.append(
            "ref\\hyp\t" + "\t".join(str(v) for v in report.confusion_values)
        )
        for i, value in enumerate(report.confusion_values):
            row = "\t".join(str(int(c)) for c in report.confusion[i])
            lines.append("%s\t%s" % (value, row))
    if report.per_label_accuracy:
        lines.append("")
        lines.append("label\tcorrect\ttotal\taccuracy_pct")
        for label, pct in report.per_label_accuracy.items():
            c, n = report.per_label_counts[label]
            lines.append("%s\t%d\t%d\t%.4f" % (label, c, n, pct))
    return "\n".join(lines) + "\n"


def write_report(report: EvaluationReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_to_tsv(report))
