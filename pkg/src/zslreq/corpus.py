"""Benchmark corpora and task construction.

Loads the PROMISE-NFR and SecReq CSV files (canonical schemas below) and
builds the classification task instances: FR vs NFR over the full PROMISE
set, one-vs-other and multi-class/multi-label tasks over the NFR subset,
and security vs non-security over SecReq (whole set or one project).

Canonical CSV schemas (RFC-4180, UTF-8):
    PROMISE: header ``id,project,class,text`` with class in
        {F,A,L,LF,MN,O,PE,SC,SE,US,FT,PO}
    SecReq:  header ``id,project,label,text`` with label in {sec,nonsec}
        and project in {ePurse,CPN,GPS}
The public datasets circulate in several shapes; converting into these
schemas is on the user, which keeps the loaders strict.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from zslreq.errors import DataError

PROMISE_CLASSES = ("F", "A", "L", "LF", "MN", "O", "PE", "SC", "SE", "US", "FT", "PO")
SECREQ_PROJECTS = ("ePurse", "CPN", "GPS")

#: NFR classes by descending support in PROMISE; PO (one sample) excluded
#: from every NFR task.
NFR_ALL_CLASSES = ("US", "SE", "O", "PE", "LF", "A", "SC", "MN", "L", "FT")
NFR_TOP4_CLASSES = ("US", "SE", "O", "PE")

TASK_NAMES = ("FR_NFR", "NFR_BINARY", "NFR_MULTICLASS", "NFR_MULTILABEL", "SECURITY")


class CorpusParseError(DataError):
    pass


class UnknownClassCode(DataError):
    pass


class UnknownProject(DataError):
    pass


class EmptySelection(DataError):
    pass


@dataclass(frozen=True)
class Requirement:
    """One dataset row."""

    id: str
    project: str | None
    text: str
    gold: str


@dataclass(frozen=True)
class TaskKind:
    """Selector for one classification task.

    ``scope`` is "top4" or "all" for the NFR tasks and "all" or
    "project:<NAME>" for SECURITY. ``target`` names the positive class of
    NFR_BINARY. ``k`` overrides the multi-label cutoff (defaults: 2 for
    top4, 3 for all).
    """

    name: str
    target: str | None = None
    scope: str = "all"
    k: int | None = None

    def __post_init__(self):
        if self.name not in TASK_NAMES:
            raise ValueError(f"unknown task {self.name!r}")
        if self.name == "NFR_BINARY" and self.target not in NFR_ALL_CLASSES:
            raise ValueError(f"NFR_BINARY needs a target NFR class, got {self.target!r}")
        if self.name.startswith("NFR") and self.scope not in ("top4", "all"):
            raise ValueError(f"NFR tasks take scope top4|all, got {self.scope!r}")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be positive")


@dataclass(frozen=True)
class TaskInstance:
    name: str  # canonical, e.g. "NFR_BINARY:SE@top4"
    classes: tuple[str, ...]
    items: tuple[Requirement, ...]
    k: int | None = None  # multi-label cutoff, None for single-label tasks

    def gold_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in self.classes}
        for item in self.items:
            counts[item.gold] += 1
        return counts


def _read_rows(path: str | Path, expected_header: list[str]) -> Iterable[tuple[int, dict]]:
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise CorpusParseError(f"{path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusParseError(f"{path}: empty file") from None
        if header != expected_header:
            raise CorpusParseError(
                f"{path}: expected header {','.join(expected_header)}, got {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise CorpusParseError(f"{path}:{lineno}: expected {len(expected_header)} fields")
            yield lineno, dict(zip(expected_header, row))


def load_promise(path: str | Path) -> list[Requirement]:
    """Load a PROMISE-NFR CSV; class codes validated, text non-empty."""
    items = []
    for lineno, row in _read_rows(path, ["id", "project", "class", "text"]):
        code = row["class"].strip()
        if code not in PROMISE_CLASSES:
            raise UnknownClassCode(f"{path}:{lineno}: unknown class {code!r}")
        text = row["text"].strip()
        if not text:
            raise CorpusParseError(f"{path}:{lineno}: empty requirement text")
        items.append(
            Requirement(id=row["id"].strip(), project=row["project"].strip() or None,
                        text=text, gold=code)
        )
    if not items:
        raise CorpusParseError(f"{path}: no rows")
    return items


def load_secreq(path: str | Path) -> list[Requirement]:
    """Load a SecReq CSV; labels map to SEC/NONSEC, projects validated."""
    items = []
    for lineno, row in _read_rows(path, ["id", "project", "label", "text"]):
        project = row["project"].strip()
        if project not in SECREQ_PROJECTS:
            raise UnknownProject(f"{path}:{lineno}: unknown project {project!r}")
        label = row["label"].strip().lower()
        if label not in ("sec", "nonsec"):
            raise CorpusParseError(f"{path}:{lineno}: label must be sec|nonsec, got {label!r}")
        text = row["text"].strip()
        if not text:
            raise CorpusParseError(f"{path}:{lineno}: empty requirement text")
        items.append(
            Requirement(id=row["id"].strip(), project=project, text=text,
                        gold="SEC" if label == "sec" else "NONSEC")
        )
    if not items:
        raise CorpusParseError(f"{path}: no rows")
    return items


def _require_golds(items: Sequence[Requirement], allowed: tuple[str, ...], task: str) -> None:
    for item in items:
        if item.gold not in allowed:
            raise UnknownClassCode(
                f"item {item.id!r}: gold {item.gold!r} does not belong to task {task}"
            )


def _nfr_subset(items: Sequence[Requirement], scope: str) -> list[Requirement]:
    classes = NFR_TOP4_CLASSES if scope == "top4" else NFR_ALL_CLASSES
    return [it for it in items if it.gold in classes]


def build_task(kind: TaskKind, items: Sequence[Requirement]) -> TaskInstance:
    """Construct a task instance; items are never mutated, remapped golds
    produce new Requirement values. Raises EmptySelection when the task's
    filter leaves nothing."""
    if kind.name == "FR_NFR":
        _require_golds(items, PROMISE_CLASSES, kind.name)
        remapped = tuple(
            replace(it, gold="FR" if it.gold == "F" else "NFR") for it in items
        )
        if not remapped:
            raise EmptySelection("no items for FR_NFR")
        return TaskInstance(name="FR_NFR", classes=("FR", "NFR"), items=remapped)

    if kind.name == "NFR_BINARY":
        _require_golds(items, PROMISE_CLASSES, kind.name)
        subset = _nfr_subset(items, kind.scope)
        target = kind.target
        remapped = tuple(
            it if it.gold == target else replace(it, gold="OTHER") for it in subset
        )
        if not remapped:
            raise EmptySelection(f"no items for NFR_BINARY:{target}@{kind.scope}")
        return TaskInstance(
            name=f"NFR_BINARY:{target}@{kind.scope}",
            classes=(target, "OTHER"),
            items=remapped,
        )

    if kind.name in ("NFR_MULTICLASS", "NFR_MULTILABEL"):
        _require_golds(items, PROMISE_CLASSES, kind.name)
        subset = tuple(_nfr_subset(items, kind.scope))
        if not subset:
            raise EmptySelection(f"no items for {kind.name}@{kind.scope}")
        classes = NFR_TOP4_CLASSES if kind.scope == "top4" else NFR_ALL_CLASSES
        k = None
        if kind.name == "NFR_MULTILABEL":
            k = kind.k if kind.k is not None else (2 if kind.scope == "top4" else 3)
        return TaskInstance(
            name=f"{kind.name}@{kind.scope}", classes=classes, items=subset, k=k
        )

    if kind.name == "SECURITY":
        _require_golds(items, ("SEC", "NONSEC"), kind.name)
        if kind.scope.startswith("project:"):
            project = kind.scope.split(":", 1)[1]
            selected = tuple(it for it in items if it.project == project)
        elif kind.scope == "all":
            selected = tuple(items)
        else:
            raise ValueError(f"SECURITY takes scope all|project:<NAME>, got {kind.scope!r}")
        if not selected:
            raise EmptySelection(f"no items for SECURITY@{kind.scope}")
        return TaskInstance(
            name=f"SECURITY@{kind.scope}", classes=("SEC", "NONSEC"), items=selected
        )

    raise ValueError(f"unknown task {kind.name!r}")
