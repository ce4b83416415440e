"""Tokenizer loading, BPE encoding, vocabulary extension, and BPC math.

Definitions load from the common single-file JSON serialization: vocabulary
and merge list under ``model.vocab`` / ``model.merges``, special tokens
under ``added_tokens`` (fields ``id``, ``content``, ``special``). Encoding
applies special literals greedily and atomically, then runs lowest-rank
merge application over the base alphabet, with byte fallback for characters
missing from the vocabulary.

Word-initial pieces use a leading-space marker when the marker symbol exists
in the vocabulary; pass ``whitespace_prefix=False`` for pure-byte mode.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Sequence

SPACE_MARKER = "▁"  # "▁", the word-initial space marker
RESERVED_TEMPLATE = "<|reserved_{n}|>"
SPECIAL_KINDS = ("pad", "chat", "reserved", "control")

# The standard chat-template literals, in the order they are assigned ids.
STANDARD_CHAT_TOKENS = (
    "<|im_start|>",
    "<|im_end|>",
    "[INST]",
    "[/INST]",
    "<<SYS>>",
    "<</SYS>>",
    "<|begin_of_text|>",
    "<|start_header_id|>",
    "<|end_header_id|>",
    "<|eot_id|>",
    "<|end_of_turn|>",
    "<|user|>",
    "<|system|>",
    "<|assistant|>",
)
DEFAULT_PAD_TOKEN = "<|pad|>"

_BYTE_TOKEN = re.compile(r"^<0x([0-9A-Fa-f]{2})>$")


class TokenizerError(ValueError):
    pass


class EncodeError(TokenizerError):
    pass


@dataclass(frozen=True)
class SpecialToken:
    literal: str
    id: int
    kind: str = "control"


@dataclass(frozen=True)
class TokenizerDef:
    vocab: dict[str, int]
    merges: list[tuple[str, str]]
    special_tokens: list[SpecialToken] = field(default_factory=list)
    base_size: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "base_size", self.base_size if self.base_size is not None else len(self.vocab))
        self.validate()

    @property
    def size(self) -> int:
        return len(self.vocab)

    def validate(self) -> None:
        ids = sorted(self.vocab.values())
        if ids != list(range(len(ids))):
            raise TokenizerError("vocab ids must be unique and contiguous from 0")
        special_literals = {s.literal for s in self.special_tokens}
        for s in self.special_tokens:
            if self.vocab.get(s.literal) != s.id:
                raise TokenizerError(f"special token {s.literal!r} missing from vocab or id mismatch")
            if s.kind not in SPECIAL_KINDS:
                raise TokenizerError(f"special token kind {s.kind!r} unknown")
        for left, right in self.merges:
            if left not in self.vocab or right not in self.vocab or left + right not in self.vocab:
                raise TokenizerError(f"merge ({left!r}, {right!r}) references unknown vocab entries")
            if left + right in special_literals:
                raise TokenizerError(f"merge produces special literal {left + right!r}")

    @property
    def merge_ranks(self) -> dict[tuple[str, str], int]:
        cached = getattr(self, "_merge_ranks", None)
        if cached is None:
            cached = {pair: rank for rank, pair in enumerate(self.merges)}
            object.__setattr__(self, "_merge_ranks", cached)
        return cached

    @property
    def uses_space_marker(self) -> bool:
        return SPACE_MARKER in self.vocab


def load_tokenizer(path: str | Path) -> TokenizerDef:
    """Read a tokenizer definition file (see module docstring for fields)."""
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    model = obj.get("model") or {}
    vocab = {str(k): int(v) for k, v in (model.get("vocab") or {}).items()}
    merges: list[tuple[str, str]] = []
    for entry in model.get("merges") or []:
        if isinstance(entry, str):
            left, _, right = entry.partition(" ")
        else:
            left, right = entry
        merges.append((left, right))
    specials = []
    for added in obj.get("added_tokens") or []:
        if not added.get("special", True):
            continue
        literal = str(added["content"])
        token_id = int(added["id"])
        vocab.setdefault(literal, token_id)
        specials.append(SpecialToken(literal=literal, id=token_id, kind=_infer_kind(literal, added.get("kind"))))
    base_size = obj.get("base_size")
    return TokenizerDef(vocab=vocab, merges=merges, special_tokens=specials, base_size=base_size)


def save_tokenizer(tok: TokenizerDef, path: str | Path) -> None:
    specials = {s.literal for s in tok.special_tokens}
    payload = {
        "model": {
            "type": "BPE",
            "vocab": {t: i for t, i in sorted(tok.vocab.items(), key=lambda kv: kv[1]) if t not in specials},
            "merges": [f"{l} {r}" for l, r in tok.merges],
        },
        "added_tokens": [
            {"id": s.id, "content": s.literal, "special": True, "kind": s.kind}
            for s in tok.special_tokens
        ],
        "base_size": tok.base_size,
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8")


def _infer_kind(literal: str, declared: str | None) -> str:
    if declared in SPECIAL_KINDS:
        return declared
    if literal == DEFAULT_PAD_TOKEN:
        return "pad"
    if literal in STANDARD_CHAT_TOKENS:
        return "chat"
    if re.match(r"^<\|reserved_\d+\|>$", literal):
        return "reserved"
    return "control"


def _special_pattern(tok: TokenizerDef) -> re.Pattern:
    cached = getattr(tok, "_special_re", None)
    if cached is None:
        literals = sorted((s.literal for s in tok.special_tokens), key=len, reverse=True)
        cached = re.compile("|".join(re.escape(l) for l in literals))
        object.__setattr__(tok, "_special_re", cached)
    return cached


def _split_specials(tok: TokenizerDef, text: str) -> list[tuple[str, bool]]:
    """Cut text into (span, is_special) pieces, longest literal first."""
    if not tok.special_tokens:
        return [(text, False)] if text else []
    pattern = _special_pattern(tok)
    pieces: list[tuple[str, bool]] = []
    pos = 0
    for m in pattern.finditer(text):
        if m.start() > pos:
            pieces.append((text[pos : m.start()], False))
        pieces.append((m.group(0), True))
        pos = m.end()
    if pos < len(text):
        pieces.append((text[pos:], False))
    return pieces


def _base_symbols(tok: TokenizerDef, piece: str, byte_fallback: bool) -> list[str]:
    symbols: list[str] = []
    for char in piece:
        if char in tok.vocab:
            symbols.append(char)
            continue
        if byte_fallback:
            byte_tokens = [f"<0x{b:02X}>" for b in char.encode("utf-8")]
            if all(t in tok.vocab for t in byte_tokens):
                symbols.extend(byte_tokens)
                continue
        raise EncodeError(f"character {char!r} has no vocab entry and no byte fallback")
    return symbols


def _merge_piece(tok: TokenizerDef, symbols: list[str]) -> list[str]:
    """Apply merges lowest rank first until none apply."""
    ranks = tok.merge_ranks
    while len(symbols) > 1:
        best_rank = None
        best_pair = None
        for pair in zip(symbols, symbols[1:]):
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_pair = pair
        if best_pair is None:
            break
        merged: list[str] = []
        i = 0
        while i < len(symbols):
            if i + 1 < len(symbols) and (symbols[i], symbols[i + 1]) == best_pair:
                merged.append(symbols[i] + symbols[i + 1])
                i += 2
            else:
                merged.append(symbols[i])
                i += 1
        symbols = merged
    return symbols


def _pretokenize(span: str, use_marker: bool) -> list[str]:
    if not use_marker:
        return [span]
    marked = span.replace(" ", SPACE_MARKER)
    if not marked.startswith(SPACE_MARKER):
        marked = SPACE_MARKER + marked
    return [p for p in re.split(f"(?={SPACE_MARKER})", marked) if p]


def encode(
    tok: TokenizerDef,
    text: str,
    *,
    whitespace_prefix: bool | None = None,
    byte_fallback: bool = True,
) -> list[int]:
    """Encode text to token ids; special literals are matched atomically."""
    use_marker = tok.uses_space_marker if whitespace_prefix is None else whitespace_prefix
    ids: list[int] = []
    for span, is_special in _split_specials(tok, text):
        if is_special:
            ids.append(tok.vocab[span])
            continue
        for piece in _pretokenize(span, use_marker):
            symbols = _base_symbols(tok, piece, byte_fallback)
            for symbol in _merge_piece(tok, symbols):
                ids.append(tok.vocab[symbol])
    return ids


def decode(tok: TokenizerDef, ids: Sequence[int]) -> str:
    """Inverse of encode over the base alphabet (best-effort elsewhere)."""
    by_id = {i: t for t, i in tok.vocab.items()}
    out: list[str] = []
    pending: list[int] = []
    for token_id in ids:
        token = by_id.get(token_id)
        if token is None:
            raise TokenizerError(f"unknown token id {token_id}")
        m = _BYTE_TOKEN.match(token)
        if m:
            pending.append(int(m.group(1), 16))
            continue
        if pending:
            out.append(bytes(pending).decode("utf-8", errors="replace"))
            pending = []
        out.append(token)
    if pending:
        out.append(bytes(pending).decode("utf-8", errors="replace"))
    text = "".join(out)
    if tok.uses_space_marker:
        text = text.replace(SPACE_MARKER, " ")
        if text.startswith(" "):
            text = text[1:]
    return text


def count_tokens(tok: TokenizerDef, docs: Iterable, **encode_kwargs) -> int:
    """Sum of encode lengths over a document stream; constant memory."""
    total = 0
    for doc in docs:
        text = doc.text if hasattr(doc, "text") else str(doc)
        try:
            total += len(encode(tok, text, **encode_kwargs))
        except EncodeError as exc:
            doc_id = getattr(doc, "id", "<unknown>")
            raise EncodeError(f"document {doc_id}: {exc}") from exc
    return total


def extend_vocab(
    tok: TokenizerDef,
    pad_literal: str | None = DEFAULT_PAD_TOKEN,
    chat_literals: Sequence[str] = STANDARD_CHAT_TOKENS,
    multiple: int = 64,
) -> TokenizerDef:
    """Append pad, chat, then reserved tokens up to the next size multiple.

    Existing ids are unchanged; reserved tokens ``<|reserved_0|>`` onward pad
    the vocabulary to the smallest multiple of ``multiple`` that fits.
    """
    if multiple < 1:
        raise TokenizerError("multiple must be >= 1")
    new_literals = ([pad_literal] if pad_literal else []) + list(chat_literals)
    if len(set(new_literals)) != len(new_literals):
        raise TokenizerError("duplicate literals among pad/chat tokens")
    for literal in new_literals:
        if literal in tok.vocab:
            raise TokenizerError(f"literal {literal!r} already present in vocabulary")

    vocab = dict(tok.vocab)
    specials = list(tok.special_tokens)
    next_id = len(vocab)

    def add(literal: str, kind: str) -> None:
        nonlocal next_id
        vocab[literal] = next_id
        specials.append(SpecialToken(literal=literal, id=next_id, kind=kind))
        next_id += 1

    if pad_literal:
        add(pad_literal, "pad")
    for literal in chat_literals:
        add(literal, "chat")

    target = -(-next_id // multiple) * multiple  # smallest multiple >= current size
    reserved_index = 0
    while next_id < target:
        literal = RESERVED_TEMPLATE.format(n=reserved_index)
        reserved_index += 1
        if literal in vocab:
            continue
        add(literal, "reserved")

    return replace(tok, vocab=vocab, special_tokens=specials, base_size=tok.base_size)


def reserved_count(tok: TokenizerDef) -> int:
    return sum(1 for s in tok.special_tokens if s.kind == "reserved")


def compare_counts(count_a: int, count_b: int) -> float:
    """Reduction of b vs a in percent, two decimals, half-up."""
    if count_a <= 0:
        raise TokenizerError("count_a must be positive")
    value = Decimal(count_a - count_b) * 100 / Decimal(count_a)
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class BpcInput:
    """Per-token losses in bits (-log2 p) plus the character count they cover."""

    token_losses: Sequence[float]
    char_count: int

    def validate(self) -> None:
        if self.char_count < 1:
            raise TokenizerError("char_count must be >= 1")
        if any(loss < 0 for loss in self.token_losses):
            raise TokenizerError("token losses must be non-negative")


def bpc(data: BpcInput) -> float:
    """Bits per character: total model bits divided by character count."""
    data.validate()
    return sum(data.token_losses) / data.char_count
