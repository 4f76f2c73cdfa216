"""Cosine-similarity label ranking.

The whole engine: score each class label against the requirement vector,
sort descending, take the top entry (or top k). No similarity thresholds
anywhere; classification is always a ranking decision. Ties keep the class
order of the originating label configuration so results are reproducible
across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from zslreq.embedding import EmbeddingVector
from zslreq.errors import DataError


class DimensionMismatch(DataError):
    pass


class ZeroNorm(DataError):
    """A vector with zero norm means the backend failed to represent the
    text; that must surface instead of scoring 0."""


class EmptyRanking(DataError):
    pass


@dataclass(frozen=True)
class ScoredClass:
    class_code: str
    score: float  # cosine, clamped to [-1, 1]


@dataclass(frozen=True)
class Ranking:
    """Classes ordered by non-increasing score, each exactly once."""

    entries: tuple[ScoredClass, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def classes(self) -> tuple[str, ...]:
        return tuple(e.class_code for e in self.entries)

    def score_of(self, class_code: str) -> float:
        for entry in self.entries:
            if entry.class_code == class_code:
                return entry.score
        raise KeyError(class_code)


def cosine(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """dot(u, v) / (||u|| * ||v||), clamped to [-1, 1] against rounding."""
    if u.dim != v.dim:
        raise DimensionMismatch(f"dims differ: {u.dim} vs {v.dim}")
    a = u.as_array()
    b = v.as_array()
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroNorm("cosine undefined for a zero-norm vector")
    value = float(np.dot(a, b)) / (norm_a * norm_b)
    return max(-1.0, min(1.0, value))


def rank_labels(
    req: EmbeddingVector, labels: Mapping[str, EmbeddingVector]
) -> Ranking:
    """Score every label against the requirement and sort descending.

    ``labels`` must be an ordered mapping of at least two classes; its
    insertion order breaks score ties. Cosine errors are re-raised with
    the offending class named.
    """
    if len(labels) < 2:
        raise ValueError("ranking needs at least two labels")
    scored = []
    for code, vec in labels.items():
        try:
            scored.append(ScoredClass(code, cosine(req, vec)))
        except (DimensionMismatch, ZeroNorm) as exc:
            raise type(exc)(f"label {code!r}: {exc}") from exc
    scored.sort(key=lambda s: -s.score)  # stable: ties keep label order
    return Ranking(tuple(scored))


def predict_single(ranking: Ranking) -> str:
    """The top-ranked class."""
    if not ranking.entries:
        raise EmptyRanking("cannot predict from an empty ranking")
    return ranking.entries[0].class_code


def predict_topk(ranking: Ranking, k: int) -> list[str]:
    """The first min(k, len) classes, order preserved."""
    if k < 1:
        raise ValueError("k must be positive")
    return list(ranking.classes()[:k])
