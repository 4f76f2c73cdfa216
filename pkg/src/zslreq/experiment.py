"""Experiment runner: corpus + labels + embedding + ranking + metrics.

One experiment is a task instance paired with a label configuration and
an embedding backend. Label strings are embedded once, before the item
loop; each requirement is embedded (through the cache), ranked against
the label vectors, and predicted by argmax or top-k. Items whose text has
no representable token are excluded from the tally with a counted
warning instead of aborting the run.

The pipeline is seedless and deterministic: the same spec against the
same backend produces byte-identical reports and logs.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from typing import Sequence

from zslreq.classifier import predict_single, predict_topk, rank_labels
from zslreq.corpus import TaskInstance, TaskKind, build_task, load_promise, load_secreq
from zslreq.embedding import CachedEmbedder, EmbedderSpec, NoKnownTokens, make_embedder
from zslreq.errors import DataError
from zslreq.labelspace import LabelConfig
from zslreq.metrics import MetricsReport, prf, tally_single, tally_topk


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one run."""

    task: TaskKind
    dataset_path: str
    config: LabelConfig
    backend: EmbedderSpec
    k: int | None = None  # top-k override; only sensible for multi-label tasks
    cache_dir: str | None = None
    batch_size: int = 32


@dataclass(frozen=True)
class LogRow:
    item_id: str
    gold: str
    status: str  # "ok" | "no-known-tokens"
    predicted: tuple[str, ...]
    scores: tuple[float, ...]  # per class, in label-config order; empty on failure


@dataclass(frozen=True)
class ExperimentResult:
    task: TaskInstance
    classes: tuple[str, ...]  # label order used for ranking (config order)
    report: MetricsReport
    log: tuple[LogRow, ...]
    excluded: int


def load_dataset(task: TaskKind, path: str):
    if task.name == "SECURITY":
        return load_secreq(path)
    return load_promise(path)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    items = load_dataset(spec.task, spec.dataset_path)
    task = build_task(spec.task, items)
    k = spec.k if spec.k is not None else task.k
    if k is not None and task.k is None:
        raise DataError(f"top-k prediction is not defined for task {task.name}")

    labels = spec.config.restricted_to(task.classes)
    embedder = make_embedder(
        spec.backend, cache_dir=spec.cache_dir, batch_size=spec.batch_size
    )
    label_vectors = {
        code: vec
        for code, vec in zip(labels, embedder.embed_many(list(labels.values())))
    }

    golds: list[str] = []
    single_preds: list[str] = []
    topk_preds: list[list[str]] = []
    log: list[LogRow] = []
    excluded = 0
    for item in task.items:
        try:
            req_vec = embedder.embed(item.text)
        except NoKnownTokens:
            excluded += 1
            log.append(LogRow(item.id, item.gold, "no-known-tokens", (), ()))
            continue
        except DataError as exc:
            raise type(exc)(f"item {item.id!r}: {exc}") from exc
        ranking = rank_labels(req_vec, label_vectors)
        golds.append(item.gold)
        if k is None:
            predicted = (predict_single(ranking),)
            single_preds.append(predicted[0])
        else:
            predicted = tuple(predict_topk(ranking, k))
            topk_preds.append(list(predicted))
        log.append(
            LogRow(
                item.id,
                item.gold,
                "ok",
                predicted,
                tuple(ranking.score_of(c) for c in labels),
            )
        )

    if not golds:
        raise DataError("every item was excluded; nothing to evaluate")
    if k is None:
        tally = tally_single(golds, single_preds, task.classes)
    else:
        tally = tally_topk(golds, topk_preds, task.classes)
    return ExperimentResult(
        task=task,
        classes=tuple(labels),
        report=prf(tally),
        log=tuple(log),
        excluded=excluded,
    )


def render_log_csv(result: ExperimentResult) -> str:
    """Prediction log: id, gold, status, predictions, per-class scores.

    Scores use repr floats so the log round-trips exactly and stays
    byte-identical across runs.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "gold", "status", "predicted", *result.classes])
    for row in result.log:
        scores = [repr(s) for s in row.scores] if row.scores else [""] * len(result.classes)
        writer.writerow([row.item_id, row.gold, row.status, "|".join(row.predicted), *scores])
    return buf.getvalue()


def compare_runs(reports: Sequence[tuple[str, MetricsReport]]) -> str:
    """Merge labelled reports into one table, best weighted F1 first.

    Ties keep the given label order; the best row carries a marker.
    """
    if not reports:
        raise DataError("nothing to compare")
    ranked = sorted(
        enumerate(reports), key=lambda pair: (-pair[1][1].weighted_f1, pair[0])
    )
    lines = [
        "| run | wP | wR | wF1 | best |",
        "|---|---|---|---|---|",
    ]
    for position, (_, (label, report)) in enumerate(ranked):
        marker = "*" if position == 0 else ""
        lines.append(
            f"| {label} | {report.weighted_precision:.2f} "
            f"| {report.weighted_recall:.2f} | {report.weighted_f1:.2f} | {marker} |"
        )
    return "\n".join(lines) + "\n"
