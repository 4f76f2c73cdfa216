"""Text-to-vector backends.

Two backends share one interface: a deterministic static word-vector
lexicon with mean pooling (offline, used throughout the test suite) and a
remote HTTP service that wraps a real sentence-encoder. A caching wrapper
keyed on (backend identifier, exact text) sits in front of either.

The static backend cannot represent negation: with mean pooling,
"not about usability" stays close to "usability". That is a limitation of
the test backend, not of the ranking engine; contextual semantics need the
remote backend.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

import numpy as np
import requests

from zslreq.errors import BackendError, DataError


class LexiconError(DataError):
    """A word-vector file could not be loaded."""


class MalformedLine(LexiconError):
    pass


class InconsistentDimension(LexiconError):
    pass


class EmptyLexicon(LexiconError):
    pass


class NoKnownTokens(DataError):
    """No token of the text is in the lexicon; the text has no representation."""


class TransportFailure(BackendError):
    """The remote service could not be reached or refused the request (retryable)."""


class ProtocolViolation(BackendError):
    """The remote service answered with a malformed payload (fatal)."""


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed-dimension real vector; every component finite."""

    components: tuple[float, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("embedding vector must have at least one component")
        if not all(math.isfinite(c) for c in self.components):
            raise ValueError("embedding vector has non-finite components")

    @property
    def dim(self) -> int:
        return len(self.components)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=np.float64)

    @classmethod
    def from_iterable(cls, values: Iterable[float]) -> "EmbeddingVector":
        return cls(tuple(float(v) for v in values))


@dataclass(frozen=True)
class Lexicon:
    """Immutable token -> vector map; all vectors share one dimension."""

    dim: int
    entries: Mapping[str, EmbeddingVector]

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def vector(self, token: str) -> EmbeddingVector:
        return self.entries[token]


_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric character.

    >>> tokenize("Look & feel")
    ['look', 'feel']
    """
    return _TOKEN_RE.findall(text.lower())


def load_lexicon(path: str | Path) -> Lexicon:
    """Load a plain-text word-vector file.

    One entry per line, single-space separated: ``<token> <f1> ... <fd>``.
    Tokens are lowercased; duplicate tokens resolve to the last occurrence.

    Raises MalformedLine (with line number), InconsistentDimension, or
    EmptyLexicon.
    """
    entries: dict[str, EmbeddingVector] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            fields = line.split(" ")
            if len(fields) < 2 or not fields[0]:
                raise MalformedLine(f"{path}:{lineno}: expected '<token> <f1> ...'")
            token = fields[0].lower()
            try:
                values = [float(f) for f in fields[1:]]
            except ValueError as exc:
                raise MalformedLine(f"{path}:{lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in values):
                raise MalformedLine(f"{path}:{lineno}: non-finite component")
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise InconsistentDimension(
                    f"{path}:{lineno}: got {len(values)} components, expected {dim}"
                )
            entries[token] = EmbeddingVector(tuple(values))
    if dim is None or not entries:
        raise EmptyLexicon(f"{path}: no entries")
    return Lexicon(dim=dim, entries=entries)


@dataclass(frozen=True)
class EmbedderSpec:
    """Names a backend: what kind, where it lives, how tokens pool.

    ``identifier`` is the cache key component and must be unique per
    (kind, source, pooling).
    """

    kind: str  # "static-lexicon" | "remote"
    source: str  # file path (static) or base URL (remote)
    pooling: str = "mean"
    identifier: str = ""

    def __post_init__(self):
        if self.kind not in ("static-lexicon", "remote"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.pooling != "mean":
            raise ValueError(f"unsupported pooling {self.pooling!r}")
        if not self.identifier:
            object.__setattr__(
                self, "identifier", f"{self.kind}:{self.source}:{self.pooling}"
            )

    @classmethod
    def static(cls, path: str | Path) -> "EmbedderSpec":
        return cls(kind="static-lexicon", source=str(path))

    @classmethod
    def remote(cls, base_url: str) -> "EmbedderSpec":
        return cls(kind="remote", source=base_url.rstrip("/"))


class Embedder(Protocol):
    """Anything that can turn text into an EmbeddingVector."""

    @property
    def identifier(self) -> str: ...

    def embed(self, text: str) -> EmbeddingVector: ...


def embed_static(lexicon: Lexicon, text: str) -> EmbeddingVector:
    """Mean of lexicon vectors for in-vocabulary tokens.

    Out-of-vocabulary tokens are skipped; raises NoKnownTokens when no
    token is in the vocabulary. Order-insensitive by construction.
    """
    if not lexicon.entries:
        raise EmptyLexicon("cannot embed with an empty lexicon")
    rows = [lexicon.entries[t].as_array() for t in tokenize(text) if t in lexicon.entries]
    if not rows:
        raise NoKnownTokens(f"no lexicon token in text: {text[:60]!r}")
    mean = np.mean(np.stack(rows), axis=0)
    return EmbeddingVector(tuple(float(v) for v in mean))


class StaticEmbedder:
    """Lexicon-backed embedder with mean pooling."""

    def __init__(self, spec: EmbedderSpec, lexicon: Lexicon | None = None):
        if spec.kind != "static-lexicon":
            raise ValueError("StaticEmbedder requires a static-lexicon spec")
        self.spec = spec
        self.lexicon = lexicon if lexicon is not None else load_lexicon(spec.source)

    @property
    def identifier(self) -> str:
        return self.spec.identifier

    def embed(self, text: str) -> EmbeddingVector:
        return embed_static(self.lexicon, text)


def _validate_remote_payload(
    payload: object, expected_count: int, url: str
) -> list[EmbeddingVector]:
    if not isinstance(payload, dict):
        raise ProtocolViolation(f"{url}: response is not a JSON object")
    rows = payload.get("embeddings")
    dim = payload.get("dim")
    if not isinstance(rows, list) or not isinstance(dim, int):
        raise ProtocolViolation(f"{url}: missing 'embeddings' or 'dim'")
    if len(rows) != expected_count:
        raise ProtocolViolation(
            f"{url}: got {len(rows)} embeddings for {expected_count} texts"
        )
    vectors = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ProtocolViolation(f"{url}: embedding {i} does not have dim={dim}")
        try:
            vec = EmbeddingVector(tuple(float(v) for v in row))
        except (TypeError, ValueError) as exc:
            raise ProtocolViolation(f"{url}: embedding {i}: {exc}") from exc
        vectors.append(vec)
    return vectors


def embed_remote(
    spec: EmbedderSpec,
    texts: Sequence[str],
    *,
    timeout: float = 30.0,
    session: requests.Session | None = None,
) -> list[EmbeddingVector]:
    """POST ``{"texts": [...]}`` to ``<base>/embed`` and validate the reply.

    The service answers ``{"model": id, "dim": D, "embeddings": [[...], ...]}``
    with one vector per text, order preserving. Any non-200 status or
    connection problem is a TransportFailure (retryable); a malformed body
    is a ProtocolViolation (fatal).
    """
    if spec.kind != "remote":
        raise ValueError("embed_remote requires a remote spec")
    if not texts:
        raise ValueError("embed_remote requires at least one text")
    url = f"{spec.source}/embed"
    http = session if session is not None else requests
    try:
        resp = http.post(url, json={"texts": list(texts)}, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportFailure(f"{url}: {exc}") from exc
    if resp.status_code != 200:
        raise TransportFailure(f"{url}: status {resp.status_code}")
    try:
        payload = resp.json()
    except ValueError as exc:
        raise ProtocolViolation(f"{url}: body is not JSON") from exc
    return _validate_remote_payload(payload, len(texts), url)


class RemoteEmbedder:
    """HTTP-service-backed embedder; batches requests."""

    def __init__(self, spec: EmbedderSpec, *, batch_size: int = 32, timeout: float = 30.0):
        if spec.kind != "remote":
            raise ValueError("RemoteEmbedder requires a remote spec")
        if batch_size < 1:
            raise ValueError("batch_size must be positive")
        self.spec = spec
        self.batch_size = batch_size
        self.timeout = timeout
        self._session = requests.Session()

    @property
    def identifier(self) -> str:
        return self.spec.identifier

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_many([text])[0]

    def embed_many(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        out: list[EmbeddingVector] = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            out.extend(
                embed_remote(self.spec, batch, timeout=self.timeout, session=self._session)
            )
        return out


def _text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class CachedEmbedder:
    """Memoizes an embedder by (backend identifier, exact text bytes).

    Errors are never cached. Concurrent misses may both delegate; results
    are identical by backend determinism, so last write wins. With
    ``cache_dir`` set, entries persist as JSON lines (backend identifier,
    text hash, dim, components) and survive across processes; components
    round-trip exactly through JSON.
    """

    def __init__(self, backend: Embedder, cache_dir: str | Path | None = None):
        self.backend = backend
        self._lock = threading.Lock()
        self._memory: dict[str, EmbeddingVector] = {}
        self._path: Path | None = None
        self.hits = 0
        self.misses = 0
        if cache_dir is not None:
            directory = Path(cache_dir)
            directory.mkdir(parents=True, exist_ok=True)
            self._path = directory / "embeddings.jsonl"
            self._load_persisted()

    @property
    def identifier(self) -> str:
        return self.backend.identifier

    def _load_persisted(self) -> None:
        if self._path is None or not self._path.exists():
            return
        with open(self._path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    if record["backend"] != self.backend.identifier:
                        continue
                    vec = EmbeddingVector(tuple(float(v) for v in record["components"]))
                    if vec.dim != record["dim"]:
                        continue
                    self._memory[record["text_sha256"]] = vec
                except (KeyError, TypeError, ValueError, json.JSONDecodeError):
                    continue  # a corrupt record costs a recompute, nothing else

    def _persist(self, digest: str, vector: EmbeddingVector) -> None:
        if self._path is None:
            return
        record = {
            "backend": self.backend.identifier,
            "text_sha256": digest,
            "dim": vector.dim,
            "components": list(vector.components),
        }
        with open(self._path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")

    def embed(self, text: str) -> EmbeddingVector:
        digest = _text_digest(text)
        with self._lock:
            cached = self._memory.get(digest)
        if cached is not None:
            self.hits += 1
            return cached
        vector = self.backend.embed(text)  # errors propagate uncached
        self.misses += 1
        with self._lock:
            self._memory[digest] = vector
            self._persist(digest, vector)
        return vector

    def embed_many(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        """Like embed per text, but misses go through the backend's batch
        path when it has one (remote backends batch their requests)."""
        digests = [_text_digest(t) for t in texts]
        with self._lock:
            found = {d: self._memory[d] for d in digests if d in self._memory}
        miss_indices = [i for i, d in enumerate(digests) if d not in found]
        if miss_indices:
            miss_texts = [texts[i] for i in miss_indices]
            batch = getattr(self.backend, "embed_many", None)
            if batch is not None:
                fresh = batch(miss_texts)
            else:
                fresh = [self.backend.embed(t) for t in miss_texts]
            self.misses += len(miss_indices)
            with self._lock:
                for i, vector in zip(miss_indices, fresh):
                    self._memory[digests[i]] = vector
                    self._persist(digests[i], vector)
                    found[digests[i]] = vector
        self.hits += len(texts) - len(miss_indices)
        return [found[d] for d in digests]


def cached_embed(backend: CachedEmbedder, text: str) -> EmbeddingVector:
    """Functional alias for CachedEmbedder.embed."""
    return backend.embed(text)


def make_embedder(
    spec: EmbedderSpec, *, cache_dir: str | Path | None = None, batch_size: int = 32
) -> CachedEmbedder:
    """Build the backend named by ``spec`` and wrap it in a cache."""
    if spec.kind == "static-lexicon":
        inner: Embedder = StaticEmbedder(spec)
    else:
        inner = RemoteEmbedder(spec, batch_size=batch_size)
    return CachedEmbedder(inner, cache_dir=cache_dir)
