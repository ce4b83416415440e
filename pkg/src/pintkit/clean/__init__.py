"""Ordered, per-source text cleaning transforms.

A dataset's cleaning pipeline is an ordered list of rules. Each rule either
transforms the document text or drops the document; drops are results, not
errors, and carry the name of the rule that rejected. A transform that
leaves no text behind is also a drop.

The transform subset {strip_html, remove_edit_source, normalize_whitespace,
latex_to_markdown} is idempotent: running the pipeline twice equals running
it once.
"""

from __future__ import annotations

import html
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from pintkit.corpus import CleaningRuleSpec, Document

from .langid import language_id, supported_languages
from .latex import latex_to_markdown
from .quality import CleanFlags, QualityThresholds, is_broken_word, quality_flags

__all__ = [
    "CleaningRule",
    "Dropped",
    "CleanFlags",
    "QualityThresholds",
    "apply_rules",
    "clean_stream",
    "CleaningStats",
    "language_id",
    "supported_languages",
    "latex_to_markdown",
    "quality_flags",
    "is_broken_word",
    "strip_html",
    "remove_edit_source",
    "normalize_whitespace",
]

RULE_KINDS = (
    "strip_first_lines",
    "min_chars",
    "strip_html",
    "remove_edit_source",
    "language_filter",
    "latex_to_markdown",
    "normalize_whitespace",
)


class RuleError(ValueError):
    """Raised for an unknown rule kind or invalid rule parameters."""


@dataclass(frozen=True)
class CleaningRule:
    kind: str
    n: int | None = None
    lang: str | None = None
    min_confidence: float | None = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise RuleError(f"unknown cleaning rule kind {self.kind!r}")
        if self.kind in ("strip_first_lines", "min_chars"):
            if self.n is None or self.n < 0:
                raise RuleError(f"{self.kind} requires n >= 0")
        if self.kind == "language_filter":
            if not self.lang:
                raise RuleError("language_filter requires lang")
            conf = self.min_confidence if self.min_confidence is not None else 0.0
            if not 0.0 <= conf <= 1.0:
                raise RuleError("language_filter min_confidence must be in [0, 1]")

    @classmethod
    def strip_first_lines(cls, n: int) -> "CleaningRule":
        return cls("strip_first_lines", n=n)

    @classmethod
    def min_chars(cls, n: int) -> "CleaningRule":
        return cls("min_chars", n=n)

    @classmethod
    def strip_html(cls) -> "CleaningRule":
        return cls("strip_html")

    @classmethod
    def remove_edit_source(cls) -> "CleaningRule":
        return cls("remove_edit_source")

    @classmethod
    def language_filter(cls, lang: str, min_confidence: float = 0.9) -> "CleaningRule":
        return cls("language_filter", lang=lang, min_confidence=min_confidence)

    @classmethod
    def latex_to_markdown(cls) -> "CleaningRule":
        return cls("latex_to_markdown")

    @classmethod
    def normalize_whitespace(cls) -> "CleaningRule":
        return cls("normalize_whitespace")

    @classmethod
    def from_spec(cls, spec: CleaningRuleSpec) -> "CleaningRule":
        params = dict(spec.params)
        return cls(
            kind=spec.kind,
            n=params.pop("n", None),
            lang=params.pop("lang", None),
            min_confidence=params.pop("min_confidence", None),
        )


@dataclass(frozen=True)
class Dropped:
    """Marker result: the document was rejected by `reason` (a rule kind)."""

    reason: str
    doc_id: str = ""


_TAG_LIKE = re.compile(r"</?[a-zA-Z][^<>]*/?>")
_BLOCK_TAG = re.compile(
    r"</?(?:p|div|br|li|ul|ol|h[1-6]|tr|table|blockquote|section|article)\b[^<>]*/?>",
    re.IGNORECASE,
)
_COMMENT = re.compile(r"<!--.*?-->", re.DOTALL)
_SCRIPT_STYLE = re.compile(r"<(script|style)\b[^<>]*>.*?</\1>", re.DOTALL | re.IGNORECASE)
_EDIT_SOURCE = re.compile(r"\s*\[\s*edit(?:\s+source)?\s*\]", re.IGNORECASE)
_MANY_NEWLINES = re.compile(r"\n{3,}")
# Internal runs only: line-leading indentation is preserved so list nesting
# and code survive normalization.
_BLANK_RUN = re.compile(r"(?<=\S)[ \t]{2,}")
_TRAILING_BLANKS = re.compile(r"[ \t]+$", re.MULTILINE)


def _unescape_fixpoint(text: str) -> str:
    # Run to fixpoint so double-encoded entities cannot resurface on a
    # second pass and break idempotence.
    for _ in range(10):
        unescaped = html.unescape(text)
        if unescaped == text:
            return text
        text = unescaped
    return text


def strip_html(text: str) -> str:
    """Remove tags and decode entities, preserving inner text and paragraph breaks."""
    text = _unescape_fixpoint(text)
    text = _SCRIPT_STYLE.sub("", text)
    text = _COMMENT.sub("", text)
    text = _BLOCK_TAG.sub("\n", text)
    text = _TAG_LIKE.sub("", text)
    return _MANY_NEWLINES.sub("\n\n", text)


def remove_edit_source(text: str) -> str:
    """Remove wiki-style "[edit source]" / "[edit]" link artifacts."""
    while True:
        cleaned = _EDIT_SOURCE.sub("", text)
        if cleaned == text:
            return text
        text = cleaned


def normalize_whitespace(text: str) -> str:
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    text = _TRAILING_BLANKS.sub("", text)
    text = _BLANK_RUN.sub(" ", text)
    text = _MANY_NEWLINES.sub("\n\n", text)
    # Trim blank lines at both ends, not first-line indentation.
    text = re.sub(r"\A\n+", "", text)
    return re.sub(r"\n+\Z", "", text)


def _apply_one(rule: CleaningRule, text: str) -> str | Dropped:
    if rule.kind == "strip_first_lines":
        return "\n".join(text.split("\n")[rule.n :])
    if rule.kind == "min_chars":
        # Unicode scalar count of the text as it stands at this rule's
        # position in the pipeline.
        return text if len(text) >= rule.n else Dropped("min_chars")
    if rule.kind == "strip_html":
        return strip_html(text)
    if rule.kind == "remove_edit_source":
        return remove_edit_source(text)
    if rule.kind == "language_filter":
        lang, confidence = language_id(text)
        wanted = rule.min_confidence if rule.min_confidence is not None else 0.0
        if lang != rule.lang or confidence < wanted:
            return Dropped("language_filter")
        return text
    if rule.kind == "latex_to_markdown":
        return latex_to_markdown(text)
    if rule.kind == "normalize_whitespace":
        return normalize_whitespace(text)
    raise RuleError(f"unknown cleaning rule kind {rule.kind!r}")


def apply_rules(doc: Document, rules: Iterable[CleaningRule]) -> Document | Dropped:
    """Apply rules in order; returns the cleaned document or the first drop."""
    text = doc.text
    for rule in rules:
        result = _apply_one(rule, text)
        if isinstance(result, Dropped):
            return Dropped(result.reason, doc_id=doc.id)
        if not result.strip():
            # Empty output is a drop, attributed to the rule that emptied it.
            return Dropped(rule.kind, doc_id=doc.id)
        text = result
    if text == doc.text:
        return doc
    return Document(id=doc.id, source=doc.source, text=text, date=doc.date, meta=doc.meta)


@dataclass
class CleaningStats:
    input_docs: int = 0
    retained: int = 0
    dropped_by_rule: Counter = field(default_factory=Counter)

    @property
    def dropped(self) -> int:
        return sum(self.dropped_by_rule.values())

    def report_lines(self) -> list[str]:
        lines = [
            f"input docs: {self.input_docs}",
            f"retained: {self.retained}",
            f"dropped: {self.dropped}",
        ]
        for rule, count in sorted(self.dropped_by_rule.items()):
            lines.append(f"  {rule}: {count}")
        return lines


def clean_stream(
    docs: Iterable[Document],
    rules: list[CleaningRule],
    stats: CleaningStats | None = None,
) -> Iterator[Document]:
    """Clean a document stream, tallying drops per rule into `stats`."""
    stats = stats if stats is not None else CleaningStats()
    for doc in docs:
        stats.input_docs += 1
        result = apply_rules(doc, rules)
        if isinstance(result, Dropped):
            stats.dropped_by_rule[result.reason] += 1
            continue
        stats.retained += 1
        yield result
