"""Filesystem persistence for datasets and review sessions.

Layout under the data root:

    datasets/<name>/*.jsonl      cleaned documents, one JSON object per line
    sessions/<id>/session.meta   session header (JSON)
    sessions/<id>/judgments.log  append-only, one judgment per line

The judgment log is the source of truth: replaying session.meta plus the log
reconstructs identical session state after a crash. Appends are serialized
per store and fsynced before the caller sees an acknowledgment.
"""

from __future__ import annotations

import json
import os
import threading
from datetime import datetime, timezone
from pathlib import Path

from pintkit.corpus import Document
from pintkit.review import Judgment, ReviewSession

ENV_DATA_DIR = "PINT_DATA_DIR"


def default_data_dir(flag_value: str | None = None) -> Path:
    """Resolve the data root: explicit flag beats env beats ./pint_data."""
    if flag_value:
        return Path(flag_value)
    env = os.environ.get(ENV_DATA_DIR)
    if env:
        return Path(env)
    return Path("pint_data")


class StoreError(RuntimeError):
    pass


def _judgment_to_obj(j: Judgment) -> dict:
    obj: dict = {
        "sample_id": j.sample_id,
        "judge_id": j.judge_id,
        "timestamp": j.timestamp.isoformat(),
    }
    if j.hallucination is not None:
        obj["hallucination"] = j.hallucination
    else:
        obj.update(expository=j.expository, toxic=j.toxic, clean=j.clean)
    return obj


def _judgment_from_obj(obj: dict) -> Judgment:
    ts = datetime.fromisoformat(obj["timestamp"])
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    if "hallucination" in obj:
        return Judgment.flag(obj["sample_id"], obj["judge_id"], bool(obj["hallucination"]), timestamp=ts)
    return Judgment.rubric(
        obj["sample_id"],
        obj["judge_id"],
        bool(obj["expository"]),
        bool(obj["toxic"]),
        bool(obj["clean"]),
        timestamp=ts,
    )


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()
        self._doc_cache: dict[str, dict[str, Document]] = {}

    # -- datasets ----------------------------------------------------------

    def dataset_dir(self, name: str) -> Path:
        return self.root / "datasets" / name

    def list_datasets(self) -> list[str]:
        base = self.root / "datasets"
        if not base.is_dir():
            return []
        return sorted(p.name for p in base.iterdir() if p.is_dir())

    def has_dataset(self, name: str) -> bool:
        base = self.dataset_dir(name)
        return base.is_dir() and any(base.glob("*.jsonl"))

    def _load_dataset(self, name: str) -> dict[str, Document]:
        if name in self._doc_cache:
            return self._doc_cache[name]
        docs: dict[str, Document] = {}
        for path in sorted(self.dataset_dir(name).glob("*.jsonl")):
            with path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    obj = json.loads(line)
                    doc = Document(
                        id=str(obj["id"]),
                        source=str(obj.get("source") or name),
                        text=str(obj.get("text", "")),
                        meta={str(k): str(v) for k, v in (obj.get("meta") or {}).items()},
                    )
                    docs[doc.id] = doc
        self._doc_cache[name] = docs
        return docs

    def dataset_ids(self, name: str) -> list[str]:
        """Document ids in deterministic file order."""
        return list(self._load_dataset(name).keys())

    def dataset_doc(self, name: str, doc_id: str) -> Document | None:
        return self._load_dataset(name).get(doc_id)

    def dataset_lengths(self, name: str) -> dict[str, int]:
        return {doc_id: len(doc.text) for doc_id, doc in self._load_dataset(name).items()}

    # -- sessions ----------------------------------------------------------

    def session_dir(self, session_id: str) -> Path:
        return self.root / "sessions" / session_id

    def list_session_ids(self) -> list[str]:
        base = self.root / "sessions"
        if not base.is_dir():
            return []
        return sorted(p.name for p in base.iterdir() if (p / "session.meta").is_file())

    def has_session(self, session_id: str) -> bool:
        return (self.session_dir(session_id) / "session.meta").is_file()

    def write_session_meta(self, session: ReviewSession, extra: dict | None = None) -> None:
        directory = self.session_dir(session.id)
        directory.mkdir(parents=True, exist_ok=True)
        meta = {
            "id": session.id,
            "dataset": session.dataset,
            "kind": session.kind,
            "seed": session.seed,
            "sample_ids": session.sample_ids,
            "judges": session.judges,
            "created_at": datetime.now(timezone.utc).isoformat(),
        }
        if extra:
            meta.update(extra)
        tmp = directory / "session.meta.tmp"
        tmp.write_text(json.dumps(meta, ensure_ascii=False, indent=2), encoding="utf-8")
        os.replace(tmp, directory / "session.meta")
        (directory / "judgments.log").touch()

    def load_session(self, session_id: str) -> ReviewSession:
        """Rebuild session state by replaying the header plus the log."""
        meta_path = self.session_dir(session_id) / "session.meta"
        if not meta_path.is_file():
            raise StoreError(f"no session {session_id!r}")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        session = ReviewSession(
            id=meta["id"],
            dataset=meta["dataset"],
            kind=meta["kind"],
            seed=int(meta["seed"]),
            sample_ids=[str(s) for s in meta["sample_ids"]],
            judges=[str(j) for j in meta["judges"]],
        )
        log_path = self.session_dir(session_id) / "judgments.log"
        if log_path.is_file():
            with log_path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        session.judgments.append(_judgment_from_obj(json.loads(line)))
        return session

    def session_meta(self, session_id: str) -> dict:
        meta_path = self.session_dir(session_id) / "session.meta"
        if not meta_path.is_file():
            raise StoreError(f"no session {session_id!r}")
        return json.loads(meta_path.read_text(encoding="utf-8"))

    def append_judgment(self, session_id: str, judgment: Judgment) -> None:
        """Durable, serialized append; the ack implies the line is on disk."""
        log_path = self.session_dir(session_id) / "judgments.log"
        if not log_path.parent.is_dir():
            raise StoreError(f"no session {session_id!r}")
        line = json.dumps(_judgment_to_obj(judgment), ensure_ascii=False)
        with self._lock:
            with log_path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
