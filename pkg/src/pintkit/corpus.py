"""Manifest-driven ingestion of raw datasets into a normalized document stream.

Datasets are described declaratively in a YAML manifest. Each input file is
newline-delimited JSON, one document per line, with fields ``id``, ``text``
and optional ``date``, ``source``, ``meta``. Reading is deterministic: the
same inputs always produce the same document order.
"""

from __future__ import annotations

import glob
import json
import logging
from dataclasses import dataclass, field
from datetime import date as Date
from pathlib import Path
from typing import Callable, Iterable, Iterator

import yaml

log = logging.getLogger(__name__)

ROLES = ("textbook", "web", "code", "finetune", "alignment")
ORDERS = ("date_descending", "file_order")

PROPORTION_TOL = 1e-9


class ManifestError(ValueError):
    """Raised when a manifest fails to parse or validate."""


@dataclass
class Document:
    """One text record flowing through ingestion and cleaning."""

    id: str
    source: str
    text: str
    date: Date | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        obj: dict = {"id": self.id, "text": self.text}
        if self.source:
            obj["source"] = self.source
        if self.date is not None:
            obj["date"] = self.date.isoformat()
        if self.meta:
            obj["meta"] = self.meta
        return json.dumps(obj, ensure_ascii=False)


@dataclass
class CleaningRuleSpec:
    """A single cleaning rule as declared in the manifest (validated by clean)."""

    kind: str
    params: dict = field(default_factory=dict)


@dataclass
class DatasetSpec:
    name: str
    role: str
    inputs: list[str]
    cleaning_rules: list[CleaningRuleSpec] = field(default_factory=list)
    token_budget: int | None = None
    order: str = "file_order"

    def validate(self) -> None:
        if not self.name:
            raise ManifestError("dataset name must be non-empty")
        if self.role not in ROLES:
            raise ManifestError(
                f"dataset {self.name!r}: role {self.role!r} not one of {ROLES}"
            )
        if self.order not in ORDERS:
            raise ManifestError(
                f"dataset {self.name!r}: order {self.order!r} not one of {ORDERS}"
            )
        if self.token_budget is not None and self.token_budget < 0:
            raise ManifestError(f"dataset {self.name!r}: token_budget must be >= 0")


@dataclass
class Manifest:
    datasets: list[DatasetSpec]
    target_proportions: dict[str, float]
    total_token_target: int = 0

    def validate(self) -> None:
        names = [d.name for d in self.datasets]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ManifestError(f"duplicate dataset name(s): {sorted(dupes)}")
        for spec in self.datasets:
            spec.validate()
        for role in self.target_proportions:
            if role not in ROLES:
                raise ManifestError(f"target_proportions: unknown role {role!r}")
        total = sum(self.target_proportions.values())
        if abs(total - 1.0) > PROPORTION_TOL:
            raise ManifestError(f"proportions sum {total:g} != 1")

    def dataset(self, name: str) -> DatasetSpec:
        for spec in self.datasets:
            if spec.name == name:
                return spec
        raise KeyError(f"no dataset named {name!r} in manifest")


def load_manifest(path: str | Path) -> Manifest:
    """Load and validate a YAML manifest file."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ManifestError(f"{path}: not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ManifestError(f"{path}: manifest root must be a mapping")

    datasets = []
    for entry in raw.get("datasets", []):
        rules = [
            CleaningRuleSpec(
                kind=str(r["kind"]),
                params={k: v for k, v in r.items() if k != "kind"},
            )
            for r in entry.get("cleaning_rules", [])
        ]
        datasets.append(
            DatasetSpec(
                name=str(entry.get("name", "")),
                role=str(entry.get("role", "")),
                inputs=[str(p) for p in entry.get("inputs", [])],
                cleaning_rules=rules,
                token_budget=entry.get("token_budget"),
                order=str(entry.get("order", "file_order")),
            )
        )
    manifest = Manifest(
        datasets=datasets,
        target_proportions={
            str(k): float(v) for k, v in (raw.get("target_proportions") or {}).items()
        },
        total_token_target=int(raw.get("total_token_target", 0) or 0),
    )
    manifest.validate()
    return manifest


def parse_record_date(value: str) -> Date | None:
    """Parse an ISO-8601 calendar date; None if unparseable."""
    s = str(value).strip()
    for candidate in (s, s[:10]):
        try:
            return Date.fromisoformat(candidate)
        except ValueError:
            continue
    return None


def _resolve_inputs(spec: DatasetSpec, base_dir: Path | None) -> list[Path]:
    paths: list[Path] = []
    for pattern in spec.inputs:
        p = Path(pattern)
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        matches = sorted(glob.glob(str(p)))
        if matches:
            paths.extend(Path(m) for m in matches)
        else:
            paths.append(p)
    return paths


class DatasetReader:
    """Iterate the documents of one dataset in its declared order.

    Malformed records are not fatal: they are skipped, counted in
    ``self.skipped``, and logged with file and line number. When the order is
    date_descending, records missing the ``date`` field are skipped-and-counted
    too, while records whose date fails to parse sort last (ties broken by id
    ascending).
    """

    def __init__(self, spec: DatasetSpec, base_dir: str | Path | None = None):
        spec.validate()
        self.spec = spec
        self.base_dir = Path(base_dir) if base_dir is not None else None
        self.skipped = 0
        self.errors: list[str] = []

    def _record_error(self, path: Path, lineno: int, reason: str) -> None:
        msg = f"{path}:{lineno}: {reason}"
        self.errors.append(msg)
        self.skipped += 1
        log.warning("skipping record: %s", msg)

    def _read_file(self, path: Path) -> Iterator[Document]:
        need_date = self.spec.order == "date_descending"
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    self._record_error(path, lineno, f"invalid JSON: {exc.msg}")
                    continue
                if not isinstance(obj, dict):
                    self._record_error(path, lineno, "record is not an object")
                    continue
                doc_id = obj.get("id")
                text = obj.get("text")
                if not doc_id:
                    self._record_error(path, lineno, "missing id")
                    continue
                if not isinstance(text, str):
                    self._record_error(path, lineno, "missing text field")
                    continue
                raw_date = obj.get("date")
                if need_date and raw_date is None:
                    self._record_error(path, lineno, "missing date (order=date_descending)")
                    continue
                parsed = parse_record_date(raw_date) if raw_date is not None else None
                meta = obj.get("meta") or {}
                yield Document(
                    id=str(doc_id),
                    source=str(obj.get("source") or self.spec.name),
                    text=text,
                    date=parsed,
                    meta={str(k): str(v) for k, v in meta.items()},
                )

    def __iter__(self) -> Iterator[Document]:
        paths = _resolve_inputs(self.spec, self.base_dir)
        if self.spec.order == "file_order":
            for path in paths:
                yield from self._read_file(path)
            return
        # date_descending: materialize, then sort. Unparseable dates sort
        # last; ties broken by id ascending so output is a total order.
        docs = [d for path in paths for d in self._read_file(path)]
        docs.sort(key=lambda d: (d.date is None, _neg_date_key(d.date), d.id))
        yield from docs


def _neg_date_key(d: Date | None) -> int:
    if d is None:
        return 0
    return -d.toordinal()


def read_documents(spec: DatasetSpec, base_dir: str | Path | None = None) -> DatasetReader:
    """Open a dataset for iteration; see DatasetReader for error handling."""
    return DatasetReader(spec, base_dir=base_dir)


class BudgetedStream:
    """Token-budget prefix of an ordered document stream.

    Budgets are soft ceilings: documents are emitted until the running token
    total strictly exceeds the budget, and the document that crosses it is
    included. A budget of 0 emits nothing. ``total_tokens`` holds the exact
    cumulative count of everything emitted so far (final once exhausted).
    """

    def __init__(
        self,
        docs: Iterable[Document],
        budget: int,
        counter: Callable[[Document], int],
    ):
        if budget < 0:
            raise ValueError("budget must be >= 0")
        self._docs = docs
        self._budget = budget
        self._counter = counter
        self.total_tokens = 0
        self.emitted = 0

    def __iter__(self) -> Iterator[Document]:
        if self._budget == 0:
            return
        for doc in self._docs:
            count = self._counter(doc)
            if count < 0:
                raise ValueError(f"counter returned negative count for doc {doc.id!r}")
            yield doc
            self.total_tokens += count
            self.emitted += 1
            if self.total_tokens > self._budget:
                return


def subsample_by_budget(
    docs: Iterable[Document],
    budget: int,
    counter: Callable[[Document], int],
) -> BudgetedStream:
    """Take the budget-limited prefix of an already-ordered stream."""
    return BudgetedStream(docs, budget, counter)


def whitespace_token_count(doc: Document) -> int:
    """Cheap fallback counter: whitespace-delimited tokens."""
    return len(doc.text.split())


def write_documents(docs: Iterable[Document], path: str | Path) -> int:
    """Write documents to a JSONL file; returns the number written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(doc.to_json() + "\n")
            n += 1
    return n
