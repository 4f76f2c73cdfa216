"""Label configurations: named mappings from class codes to label strings.

The strings are what actually gets embedded, so built-in configurations
are stored verbatim as JSON assets, including their original
capitalization quirks and typos ("look feel" vs "look & feel",
"incresaed", "avaliable", ...); fidelity beats normalization because the
label text is the model input. Helpers cover the two mechanical label
operations: comma-"or" composition of term lists and "not about" negation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from zslreq.errors import DataError

STRATEGIES = ("original", "expert", "embedding-top20", "embedding-top50", "combined")

#: Human-readable names for the class codes used across the corpora.
CLASS_DISPLAY = {
    "FR": "Functional",
    "NFR": "Non-functional",
    "A": "Availability",
    "L": "Legal",
    "LF": "Look and feel",
    "MN": "Maintainability",
    "O": "Operational",
    "PE": "Performance",
    "SC": "Scalability",
    "SE": "Security",
    "US": "Usability",
    "FT": "Fault tolerance",
    "PO": "Portability",
    "OTHER": "Other",
    "SEC": "Security-related",
    "NONSEC": "Non-security-related",
}


class UnknownConfig(DataError):
    pass


class EmptyTermList(DataError):
    pass


class EmptyLabel(DataError):
    pass


class ConfigParseError(DataError):
    pass


class MissingClass(DataError):
    pass


class DuplicateClass(DataError):
    pass


@dataclass(frozen=True)
class LabelConfig:
    """One label string per class; insertion order of ``labels`` is the
    deterministic tie-break order used by the ranking."""

    id: str
    strategy: str
    labels: Mapping[str, str]
    variant: str = ""  # e.g. "Original 1", "Expert curated + Original 2"
    task: str = ""  # config family, e.g. "FR_NFR", "NFR_BINARY"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigParseError(f"{self.id}: unknown strategy {self.strategy!r}")
        if not self.labels:
            raise ConfigParseError(f"{self.id}: no labels")
        for code, text in self.labels.items():
            if not code:
                raise ConfigParseError(f"{self.id}: empty class code")
            if not text:
                raise ConfigParseError(f"{self.id}: empty label for class {code}")

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(self.labels.keys())

    def restricted_to(self, classes: Sequence[str]) -> dict[str, str]:
        """Labels for exactly ``classes``, kept in this config's order.

        Raises MissingClass when the config does not cover a class.
        """
        missing = [c for c in classes if c not in self.labels]
        if missing:
            raise MissingClass(f"{self.id}: no label for {', '.join(missing)}")
        wanted = set(classes)
        return {c: self.labels[c] for c in self.labels if c in wanted}


def compose_terms(terms: Sequence[str]) -> str:
    """Join terms with ", " and put "or " before the last when >= 2 terms.

    >>> compose_terms(["security", "authorization", "protection"])
    'security, authorization, or protection'
    """
    if not terms:
        raise EmptyTermList("no terms to compose")
    for i, term in enumerate(terms):
        if not term:
            raise EmptyTermList(f"term {i + 1} is empty")
    if len(terms) == 1:
        return terms[0]
    return ", ".join(terms[:-1]) + ", or " + terms[-1]


def negate_label(label: str) -> str:
    """Prefix with "not about "; not idempotent, callers control repetition."""
    if not label:
        raise EmptyLabel("cannot negate an empty label")
    return "not about " + label


def _pairs_no_duplicates(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise DuplicateClass(f"duplicate class {key!r}")
        seen.add(key)
    return dict(pairs)


def _config_from_mapping(data: Mapping, origin: str) -> LabelConfig:
    if not isinstance(data, Mapping):
        raise ConfigParseError(f"{origin}: expected a JSON object")
    try:
        config_id = data["id"]
        strategy = data["strategy"]
        labels = data["labels"]
    except KeyError as exc:
        raise ConfigParseError(f"{origin}: missing key {exc}") from exc
    if not isinstance(config_id, str) or not config_id:
        raise ConfigParseError(f"{origin}: 'id' must be a non-empty string")
    if not isinstance(labels, Mapping) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in labels.items()
    ):
        raise ConfigParseError(f"{origin}: 'labels' must map class codes to strings")
    return LabelConfig(
        id=config_id,
        strategy=strategy,
        labels=dict(labels),
        variant=data.get("variant", ""),
        task=data.get("task", ""),
    )


def load_config(path: str | Path, required_classes: Sequence[str] | None = None) -> LabelConfig:
    """Load one user configuration from a JSON file.

    Schema: ``{"id": "...", "strategy": "...", "labels": {"<code>": "<label>"}}``
    (optional "variant" and "task" strings). With ``required_classes``
    given, every one of those classes must have a label (MissingClass) and
    no others may appear (ConfigParseError). Duplicate class keys in the
    JSON raise DuplicateClass.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh, object_pairs_hook=_pairs_no_duplicates)
    except OSError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: invalid JSON: {exc}") from exc
    config = _config_from_mapping(data, str(path))
    if required_classes is not None:
        missing = [c for c in required_classes if c not in config.labels]
        if missing:
            raise MissingClass(f"{path}: no label for {', '.join(missing)}")
        extra = [c for c in config.labels if c not in set(required_classes)]
        if extra:
            raise ConfigParseError(f"{path}: unexpected classes {', '.join(extra)}")
    return config


def save_config(config: LabelConfig, path: str | Path) -> None:
    """Write a configuration in the load_config schema (round-trips exactly)."""
    data = {
        "id": config.id,
        "strategy": config.strategy,
        "variant": config.variant,
        "task": config.task,
        "labels": dict(config.labels),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


_BUILTINS: dict[str, LabelConfig] | None = None


def _load_builtins() -> dict[str, LabelConfig]:
    global _BUILTINS
    if _BUILTINS is None:
        configs: dict[str, LabelConfig] = {}
        asset_dir = resources.files("zslreq").joinpath("assets/labels")
        for entry in sorted(asset_dir.iterdir(), key=lambda e: e.name):
            if not entry.name.endswith(".json"):
                continue
            data = json.loads(entry.read_text(encoding="utf-8"))
            for item in data:
                config = _config_from_mapping(item, entry.name)
                if config.id in configs:
                    raise ConfigParseError(f"duplicate builtin id {config.id}")
                configs[config.id] = config
        _BUILTINS = configs
    return _BUILTINS


def builtin_config(config_id: str) -> LabelConfig:
    """Return a published configuration by id (case-sensitive).

    Raises UnknownConfig for anything not shipped in the assets.
    """
    configs = _load_builtins()
    try:
        return configs[config_id]
    except KeyError:
        raise UnknownConfig(config_id) from None


def builtin_config_ids() -> list[str]:
    """All shipped configuration ids, sorted."""
    return sorted(_load_builtins())
