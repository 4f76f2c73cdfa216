"""Multi-annotator agreement statistics.

Supports the label-curation workflow: three annotators tag candidate
terms with yes/no/maybe, maybes get resolved to yes/no, then the final
tags are decided by majority vote. The raw three-category table feeds the
perfect/partial/disagreement breakdown; the resolved table feeds Fleiss'
kappa and Krippendorff's alpha (nominal, complete designs only), read
through the Landis-Koch bands.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from zslreq.errors import DataError


class WrongAnnotatorCount(DataError):
    pass


class UnresolvedMaybe(DataError):
    pass


class Tie(DataError):
    """Even vote counts; the caller must resolve."""


class DegenerateTable(DataError):
    """The statistic is undefined for this table (e.g. no variation at all)."""


class OutOfRange(DataError):
    pass


class IncompleteTable(DataError):
    pass


@dataclass(frozen=True)
class AnnotationTable:
    """Complete items x annotators grid of nominal tags."""

    items: tuple[str, ...]
    annotators: tuple[str, ...]
    tags: Mapping[tuple[str, str], str]

    def __post_init__(self):
        if len(self.annotators) < 2:
            raise WrongAnnotatorCount("need at least two annotators")
        if not self.items:
            raise DataError("need at least one item")
        for item in self.items:
            for annotator in self.annotators:
                if (item, annotator) not in self.tags:
                    raise IncompleteTable(f"missing tag for ({item}, {annotator})")

    def row(self, item: str) -> tuple[str, ...]:
        return tuple(self.tags[(item, a)] for a in self.annotators)

    def categories(self) -> tuple[str, ...]:
        return tuple(sorted({self.tags[(i, a)] for i in self.items for a in self.annotators}))

    @classmethod
    def from_rows(cls, rows: Mapping[str, Sequence[str]]) -> "AnnotationTable":
        """Build from {item: (tag per annotator)} with positional annotator ids."""
        items = tuple(rows)
        if not items:
            raise DataError("need at least one item")
        width = len(next(iter(rows.values())))
        annotators = tuple(f"a{i + 1}" for i in range(width))
        tags = {}
        for item, row in rows.items():
            if len(row) != width:
                raise IncompleteTable(f"item {item!r} has {len(row)} tags, expected {width}")
            for annotator, tag in zip(annotators, row):
                tags[(item, annotator)] = tag
        return cls(items, annotators, tags)


@dataclass(frozen=True)
class AgreementBreakdown:
    perfect: float
    partial: float
    disagreement: float


def breakdown(table: AnnotationTable) -> AgreementBreakdown:
    """Per item: perfect when all three tags agree, disagreement when all
    three differ, partial otherwise; proportions over items."""
    if len(table.annotators) != 3:
        raise WrongAnnotatorCount("breakdown is defined for exactly three annotators")
    allowed = {"yes", "no", "maybe"}
    unknown = set(table.categories()) - allowed
    if unknown:
        raise DataError(f"unexpected tags {sorted(unknown)}; expected yes/no/maybe")
    perfect = partial = disagree = 0
    for item in table.items:
        distinct = len(set(table.row(item)))
        if distinct == 1:
            perfect += 1
        elif distinct == 3:
            disagree += 1
        else:
            partial += 1
    n = len(table.items)
    return AgreementBreakdown(perfect / n, partial / n, disagree / n)


def majority_vote(tags: Sequence[str]) -> str:
    """Strictly most frequent of yes/no; maybes must be resolved first."""
    if not tags:
        raise DataError("no tags to vote on")
    if "maybe" in tags:
        raise UnresolvedMaybe("resolve 'maybe' tags to yes/no before voting")
    counts = Counter(tags)
    unknown = set(counts) - {"yes", "no"}
    if unknown:
        raise DataError(f"unexpected tags {sorted(unknown)}; expected yes/no")
    if counts["yes"] == counts["no"]:
        raise Tie(f"{counts['yes']} yes vs {counts['no']} no")
    return "yes" if counts["yes"] > counts["no"] else "no"


def fleiss_kappa(table: AnnotationTable) -> float:
    """Chance-corrected agreement for a fixed rater count per item.

    kappa = (P_bar - Pe_bar) / (1 - Pe_bar); by convention the value is
    1.0 when observed and expected agreement are both exactly 1 (all
    assignments in one category over several items).
    """
    categories = table.categories()
    n_items = len(table.items)
    n_raters = len(table.annotators)
    if n_items == 1 and len(categories) == 1:
        raise DegenerateTable("single item with a single category")
    counts = []
    for item in table.items:
        row = Counter(table.row(item))
        counts.append([row.get(c, 0) for c in categories])
    p_bar = sum(
        (sum(v * v for v in row) - n_raters) / (n_raters * (n_raters - 1))
        for row in counts
    ) / n_items
    totals = [sum(row[j] for row in counts) for j in range(len(categories))]
    grand = n_items * n_raters
    pe_bar = sum((t / grand) ** 2 for t in totals)
    if pe_bar == 1.0:
        return 1.0  # all one category: observed agreement is 1 as well
    return (p_bar - pe_bar) / (1.0 - pe_bar)


def krippendorff_alpha(table: AnnotationTable) -> float:
    """Nominal-level alpha over a complete table, via the coincidence matrix.

    alpha = 1 - Do/De. Raises DegenerateTable when expected disagreement
    is zero (every cell one category).
    """
    m = len(table.annotators)
    coincidence: Counter[tuple[str, str]] = Counter()
    for item in table.items:
        row = table.row(item)
        for i, a in enumerate(row):
            for j, b in enumerate(row):
                if i != j:
                    coincidence[(a, b)] += 1
    # each ordered pair weighs 1/(m-1); totals per category equal raw counts
    categories = table.categories()
    n_c = {
        c: sum(coincidence[(c, k)] for k in categories) / (m - 1) for c in categories
    }
    n = sum(n_c.values())
    do_sum = sum(v / (m - 1) for (a, b), v in coincidence.items() if a != b)
    de_sum = sum(
        n_c[a] * n_c[b] for a in categories for b in categories if a != b
    ) / (n - 1)
    if de_sum == 0.0:
        raise DegenerateTable("no expected disagreement (single category)")
    return 1.0 - do_sum / de_sum


#: Landis-Koch bands as (upper edge, name); upper edges are inclusive.
KAPPA_BANDS = (
    (0.20, "slight"),
    (0.40, "fair"),
    (0.60, "moderate"),
    (0.80, "substantial"),
)

BAND_ORDER = ("poor", "slight", "fair", "moderate", "substantial", "almost perfect")


def interpret_kappa(value: float) -> str:
    """Map an agreement statistic in [-1, 1] onto its Landis-Koch band."""
    if not -1.0 <= value <= 1.0:
        raise OutOfRange(f"{value} outside [-1, 1]")
    if value < 0:
        return "poor"
    for upper, name in KAPPA_BANDS:
        if value <= upper:
            return name
    return "almost perfect"


def pooled(tables: Mapping[str, AnnotationTable]) -> AnnotationTable:
    """Merge per-label tables into one (micro aggregation); items are
    prefixed with their group name to stay distinct."""
    if not tables:
        raise DataError("no tables to pool")
    annotator_sets = {t.annotators for t in tables.values()}
    if len(annotator_sets) != 1:
        raise DataError("pooled tables must share the same annotators")
    annotators = next(iter(annotator_sets))
    items = []
    tags = {}
    for group in tables:
        table = tables[group]
        for item in table.items:
            new_id = f"{group}/{item}"
            items.append(new_id)
            for a in annotators:
                tags[(new_id, a)] = table.tags[(item, a)]
    return AnnotationTable(tuple(items), annotators, tags)


def load_tags(path: str | Path) -> dict[str, AnnotationTable]:
    """Load a tag CSV into one AnnotationTable per group.

    Header ``item,annotator,tag`` (single group "") or
    ``item,annotator,tag,group``. Completeness is validated per group.
    """
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header == ["item", "annotator", "tag"]:
            has_group = False
        elif header == ["item", "annotator", "tag", "group"]:
            has_group = True
        else:
            raise DataError(f"{path}: expected header item,annotator,tag[,group]")
        cells: dict[str, dict[tuple[str, str], str]] = {}
        items: dict[str, dict[str, None]] = {}
        annotators: dict[str, dict[str, None]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields")
            group = row[3] if has_group else ""
            item, annotator, tag = row[0], row[1], row[2]
            bucket = cells.setdefault(group, {})
            if (item, annotator) in bucket:
                raise DataError(f"{path}:{lineno}: duplicate cell ({item}, {annotator})")
            bucket[(item, annotator)] = tag
            items.setdefault(group, {})[item] = None
            annotators.setdefault(group, {})[annotator] = None
    tables = {}
    for group, bucket in cells.items():
        tables[group] = AnnotationTable(
            tuple(items[group]), tuple(annotators[group]), bucket
        )
    return tables
