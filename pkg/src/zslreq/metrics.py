"""Confusion accounting and precision/recall/F1 reports.

Single-label tallies follow the standard definitions. Top-k tallies score
a hit when the gold class appears anywhere in the prediction set; every
non-gold member of the set costs that class a false positive. Zero
denominators yield 0 by convention, and the weighted aggregates are the
support-weighted means of the per-class values.

Tallies are mergeable: partial tallies over item shards combine by
field-wise addition, so the item loop may run in parallel.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

from zslreq.errors import DataError


class LengthMismatch(DataError):
    pass


class UnknownClass(DataError):
    pass


class EmptyTally(DataError):
    pass


@dataclass(frozen=True)
class ConfusionTally:
    classes: tuple[str, ...]
    tp: Mapping[str, int]
    fp: Mapping[str, int]
    fn: Mapping[str, int]
    total: int

    def support(self, class_code: str) -> int:
        return self.tp[class_code] + self.fn[class_code]

    def merged(self, other: "ConfusionTally") -> "ConfusionTally":
        if self.classes != other.classes:
            raise UnknownClass("cannot merge tallies over different class sets")
        return ConfusionTally(
            classes=self.classes,
            tp={c: self.tp[c] + other.tp[c] for c in self.classes},
            fp={c: self.fp[c] + other.fp[c] for c in self.classes},
            fn={c: self.fn[c] + other.fn[c] for c in self.classes},
            total=self.total + other.total,
        )


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    per_class: Mapping[str, ClassMetrics]  # ordered by the tally's classes
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    total: int


def _check_stream(golds: Sequence[str], preds: Sequence, classes: Sequence[str]) -> None:
    if len(golds) != len(preds):
        raise LengthMismatch(f"{len(golds)} golds vs {len(preds)} predictions")
    known = set(classes)
    for g in golds:
        if g not in known:
            raise UnknownClass(f"gold {g!r} not in classes")


def tally_single(
    golds: Sequence[str], preds: Sequence[str], classes: Sequence[str]
) -> ConfusionTally:
    """Standard single-label confusion counts."""
    _check_stream(golds, preds, classes)
    known = set(classes)
    tp = {c: 0 for c in classes}
    fp = {c: 0 for c in classes}
    fn = {c: 0 for c in classes}
    for g, p in zip(golds, preds):
        if p not in known:
            raise UnknownClass(f"prediction {p!r} not in classes")
        if g == p:
            tp[g] += 1
        else:
            fn[g] += 1
            fp[p] += 1
    return ConfusionTally(tuple(classes), tp, fp, fn, len(golds))


def tally_topk(
    golds: Sequence[str], predsets: Sequence[Sequence[str]], classes: Sequence[str]
) -> ConfusionTally:
    """Top-k confusion counts: gold in the set is a tp, otherwise a fn;
    each non-gold member of the set is an fp for its class."""
    _check_stream(golds, predsets, classes)
    known = set(classes)
    tp = {c: 0 for c in classes}
    fp = {c: 0 for c in classes}
    fn = {c: 0 for c in classes}
    for g, pset in zip(golds, predsets):
        for p in pset:
            if p not in known:
                raise UnknownClass(f"prediction {p!r} not in classes")
        members = set(pset)
        if g in members:
            tp[g] += 1
        else:
            fn[g] += 1
        for p in members:
            if p != g:
                fp[p] += 1
    return ConfusionTally(tuple(classes), tp, fp, fn, len(golds))


def _safe_div(num: int, den: int) -> float:
    return num / den if den else 0.0


def prf(tally: ConfusionTally) -> MetricsReport:
    """Per-class precision/recall/F1 plus support-weighted aggregates."""
    if tally.total <= 0:
        raise EmptyTally("no items tallied")
    per_class = {}
    for c in tally.classes:
        p = _safe_div(tally.tp[c], tally.tp[c] + tally.fp[c])
        r = _safe_div(tally.tp[c], tally.tp[c] + tally.fn[c])
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        per_class[c] = ClassMetrics(p, r, f1, tally.support(c))
    total_support = sum(m.support for m in per_class.values())
    if total_support == 0:
        raise EmptyTally("zero total support")

    def weighted(attr: str) -> float:
        return sum(getattr(m, attr) * m.support for m in per_class.values()) / total_support

    return MetricsReport(
        per_class=per_class,
        weighted_precision=weighted("precision"),
        weighted_recall=weighted("recall"),
        weighted_f1=weighted("f1"),
        total=tally.total,
    )


REPORT_COLUMNS = ("class", "precision", "recall", "f1", "support")


def render_report(report: MetricsReport, fmt: str = "csv") -> str:
    """Deterministic text table, values rounded to 2 decimals.

    CSV columns ``class,precision,recall,f1,support`` with a final
    ``weighted`` row; Markdown mirrors the same shape.
    """
    rows = [
        (code, f"{m.precision:.2f}", f"{m.recall:.2f}", f"{m.f1:.2f}", str(m.support))
        for code, m in report.per_class.items()
    ]
    rows.append(
        (
            "weighted",
            f"{report.weighted_precision:.2f}",
            f"{report.weighted_recall:.2f}",
            f"{report.weighted_f1:.2f}",
            str(report.total),
        )
    )
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "md":
        lines = [
            "| " + " | ".join(REPORT_COLUMNS) + " |",
            "|" + "---|" * len(REPORT_COLUMNS),
        ]
        lines.extend("| " + " | ".join(row) + " |" for row in rows)
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_report_csv(text: str) -> MetricsReport:
    """Read back a rendered CSV report (rounded values, '#' lines skipped)."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != list(REPORT_COLUMNS):
        raise DataError(f"not a report CSV (header {header})")
    per_class = {}
    weighted = None
    total = 0
    for row in reader:
        code, p, r, f1, support = row
        if code == "weighted":
            weighted = (float(p), float(r), float(f1))
            total = int(support)
        else:
            per_class[code] = ClassMetrics(float(p), float(r), float(f1), int(support))
    if weighted is None:
        raise DataError("report CSV has no weighted row")
    return MetricsReport(per_class, weighted[0], weighted[1], weighted[2], total)
