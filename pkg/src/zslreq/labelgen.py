"""Nearest-term suggestion over a word-vector lexicon.

Feeds the word-embedding labelling strategy: given a class name, list the
most similar lexicon terms for human yes/no/maybe tagging, then compose
the accepted ones into a candidate label string. Queries are single
tokens; multi-token queries are rejected rather than pooled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Sequence

from zslreq.classifier import cosine
from zslreq.embedding import Lexicon, tokenize
from zslreq.errors import DataError
from zslreq.labelspace import compose_terms


class QueryNotInLexicon(DataError):
    pass


class EmptySelection(DataError):
    pass


@dataclass(frozen=True)
class TermSuggestion:
    term: str
    similarity: float


def nearest_terms(lexicon: Lexicon, query: str, n: int) -> list[TermSuggestion]:
    """The n lexicon terms most similar to the query token.

    Sorted by descending cosine, ties broken lexicographically; the query
    itself is excluded. Returns fewer than n when the lexicon is small.
    """
    if n < 1:
        raise ValueError("n must be positive")
    tokens = tokenize(query)
    if len(tokens) != 1:
        raise DataError(f"query must be a single token, got {query!r}")
    token = tokens[0]
    if token not in lexicon:
        raise QueryNotInLexicon(token)
    anchor = lexicon.vector(token)
    scored = [
        TermSuggestion(term, cosine(anchor, vec))
        for term, vec in lexicon.entries.items()
        if term != token
    ]
    scored.sort(key=lambda s: (-s.similarity, s.term))
    return scored[:n]


def suggest_label(
    suggestions: Sequence[TermSuggestion], accepted: Collection[str]
) -> str:
    """Compose the accepted terms, kept in suggestion order, into a label."""
    if not accepted:
        raise EmptySelection("no terms accepted")
    offered = {s.term for s in suggestions}
    strays = [t for t in accepted if t not in offered]
    if strays:
        raise DataError(f"accepted terms not among suggestions: {', '.join(strays)}")
    accepted_set = set(accepted)
    ordered = [s.term for s in suggestions if s.term in accepted_set]
    return compose_terms(ordered)
