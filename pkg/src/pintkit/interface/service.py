"""Review workflow on top of the session store.

Every response is a pure function of the persisted log plus the request; the
service never mutates corpus files. Session creation is idempotent per
(dataset, kind, seed).
"""

from __future__ import annotations

import threading
from typing import Any

from pintkit import review
from pintkit.corpus import Document

from .store import SessionStore

# Closed set of machine-readable error codes carried by ApiError.
ERROR_CODES = (
    "unknown_dataset",
    "unknown_session",
    "unknown_judge",
    "unknown_sample",
    "duplicate_judgment",
    "kind_mismatch",
    "session_complete",
    "invalid_request",
)

_HTTP_STATUS = {
    "unknown_dataset": 404,
    "unknown_session": 404,
    "unknown_judge": 404,
    "unknown_sample": 404,
    "duplicate_judgment": 409,
    "kind_mismatch": 400,
    "session_complete": 409,
    "invalid_request": 400,
}


class ApiError(Exception):
    def __init__(self, code: str, message: str, detail: Any = None):
        assert code in ERROR_CODES, f"undocumented error code {code!r}"
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail

    @property
    def http_status(self) -> int:
        return _HTTP_STATUS[self.code]

    def to_obj(self) -> dict:
        obj = {"code": self.code, "message": self.message}
        if self.detail is not None:
            obj["detail"] = self.detail
        return obj


def session_id_for(dataset: str, kind: str, seed: int) -> str:
    return f"{dataset}-{kind}-s{seed}"


def _parse_n(n: int | str) -> int:
    try:
        return int(n)
    except (TypeError, ValueError):
        raise ApiError("invalid_request", f"n must be 'auto' or an integer, got {n!r}") from None


class ReviewService:
    def __init__(self, store: SessionStore):
        self.store = store
        self._write_lock = threading.Lock()

    # -- sessions ----------------------------------------------------------

    def create_session(
        self,
        dataset: str,
        kind: str,
        n: int | str,
        seed: int,
        judges: list[str],
    ) -> tuple[review.ReviewSession, list[str], bool]:
        """Create (or fetch, idempotently) a session; returns warnings too."""
        if kind not in review.SESSION_KINDS:
            raise ApiError("invalid_request", f"unknown session kind {kind!r}")
        if not judges:
            raise ApiError("invalid_request", "at least one judge is required")
        if len(set(judges)) != len(judges):
            raise ApiError("invalid_request", "duplicate judge ids")

        session_id = session_id_for(dataset, kind, seed)
        if self.store.has_session(session_id):
            meta = self.store.session_meta(session_id)
            return self.store.load_session(session_id), list(meta.get("warnings", [])), False

        if not self.store.has_dataset(dataset):
            raise ApiError("unknown_dataset", f"dataset {dataset!r} is not ingested")

        warnings: list[str] = []
        if kind == review.RUBRIC_KIND:
            population = self.store.dataset_ids(dataset)
            wanted = review.required_sample_size() if n == "auto" else _parse_n(n)
            if wanted < 0:
                raise ApiError("invalid_request", "n must be >= 0")
            if wanted > len(population):
                warnings.append(
                    f"requested {wanted} samples but dataset has {len(population)}; clamped"
                )
            sample_ids = review.draw_sample(population, wanted, seed)
        else:
            # Fine-tune review targets the long tail: every sample at or
            # above the 95th-percentile length. A numeric n samples within
            # that region; "auto" reviews the whole region.
            lengths = self.store.dataset_lengths(dataset)
            if not lengths:
                raise ApiError("unknown_dataset", f"dataset {dataset!r} is empty")
            region = review.top_tail_ids(lengths)
            if n == "auto":
                sample_ids = region
            else:
                wanted = _parse_n(n)
                if wanted > len(region):
                    warnings.append(
                        f"requested {wanted} samples but the 95th-percentile region has {len(region)}; clamped"
                    )
                sample_ids = review.draw_sample(region, wanted, seed)

        session = review.ReviewSession(
            id=session_id,
            dataset=dataset,
            kind=kind,
            seed=seed,
            sample_ids=sample_ids,
            judges=list(judges),
        )
        self.store.write_session_meta(session, extra={"warnings": warnings, "n_requested": n})
        return session, warnings, True

    def _load(self, session_id: str) -> review.ReviewSession:
        if not self.store.has_session(session_id):
            raise ApiError("unknown_session", f"no session {session_id!r}")
        return self.store.load_session(session_id)

    def list_sessions(self) -> list[dict]:
        return [self.session_summary(sid) for sid in self.store.list_session_ids()]

    def session_summary(self, session_id: str) -> dict:
        session = self._load(session_id)
        return {
            "id": session.id,
            "dataset": session.dataset,
            "kind": session.kind,
            "seed": session.seed,
            "sample_count": len(session.sample_ids),
            "judges": session.judges,
            "status": session.status,
            "progress": self._progress(session),
        }

    # -- review flow -------------------------------------------------------

    def next_sample(self, session_id: str, judge_id: str) -> dict:
        """The judge's frontier: lowest-index sample they have not judged."""
        session = self._load(session_id)
        if judge_id not in session.judges:
            raise ApiError("unknown_judge", f"judge {judge_id!r} is not enrolled")
        seen = session.judged_by(judge_id)
        for position, sample_id in enumerate(session.sample_ids):
            if sample_id in seen:
                continue
            doc = self.store.dataset_doc(session.dataset, sample_id)
            if doc is None:
                raise ApiError(
                    "unknown_sample", f"sample {sample_id!r} missing from dataset {session.dataset!r}"
                )
            return {
                "done": False,
                "sample": self._sample_obj(doc, position, len(session.sample_ids)),
            }
        return {"done": True, "sample": None}

    @staticmethod
    def _sample_obj(doc: Document, position: int, total: int) -> dict:
        return {
            "id": doc.id,
            "text": doc.text,
            "source": doc.source,
            "meta": doc.meta,
            "position": position,
            "total": total,
        }

    def submit_judgment(self, session_id: str, payload: dict) -> dict:
        # Check-then-append must be atomic or two racing duplicates could
        # both pass validation; this is the single writer the log expects.
        with self._write_lock:
            session = self._load(session_id)
            if session.complete:
                raise ApiError("session_complete", f"session {session_id!r} is already complete")
            judgment = self._parse_judgment(session, payload)
            try:
                session.record(judgment)
            except review.ReviewError as exc:
                raise ApiError(self._record_error_code(session, judgment), str(exc)) from exc
            self.store.append_judgment(session_id, judgment)
            return {"ok": True, "tallies": self._tallies(session)}

    def _parse_judgment(self, session: review.ReviewSession, payload: dict) -> review.Judgment:
        sample_id = payload.get("sample_id")
        judge_id = payload.get("judge_id")
        if not sample_id or not judge_id:
            raise ApiError("invalid_request", "sample_id and judge_id are required")
        rubric_keys = ("expository", "toxic", "clean")
        has_rubric = all(payload.get(k) is not None for k in rubric_keys)
        has_flag = payload.get("hallucination") is not None
        if session.kind == review.RUBRIC_KIND:
            if has_flag or not has_rubric:
                raise ApiError(
                    "kind_mismatch",
                    "this session expects the expository/toxic/clean rubric triple",
                )
            return review.Judgment.rubric(
                str(sample_id),
                str(judge_id),
                bool(payload["expository"]),
                bool(payload["toxic"]),
                bool(payload["clean"]),
            )
        if has_rubric or not has_flag:
            raise ApiError("kind_mismatch", "this session expects the hallucination flag")
        return review.Judgment.flag(str(sample_id), str(judge_id), bool(payload["hallucination"]))

    @staticmethod
    def _record_error_code(session: review.ReviewSession, judgment: review.Judgment) -> str:
        if judgment.sample_id not in set(session.sample_ids):
            return "unknown_sample"
        if judgment.judge_id not in session.judges:
            return "unknown_judge"
        return "duplicate_judgment"

    # -- reporting ---------------------------------------------------------

    @staticmethod
    def _progress(session: review.ReviewSession) -> dict:
        per_judge = {j: len(session.judged_by(j)) for j in session.judges}
        return {
            "judged": len(session.judgments),
            "expected": len(session.sample_ids) * len(session.judges),
            "per_judge": per_judge,
        }

    def _tallies(self, session: review.ReviewSession) -> dict:
        judged_samples = {j.sample_id for j in session.judgments}
        tallies: dict = {
            "judged": len(session.judgments),
            "expected": len(session.sample_ids) * len(session.judges),
            "samples_judged": len(judged_samples),
        }
        if session.kind == review.RUBRIC_KIND:
            by_sample: dict[str, list[int]] = {}
            for j in session.judgments:
                by_sample.setdefault(j.sample_id, []).append(review.score_sample(j))
            if by_sample:
                sample_means = [sum(v) / len(v) for v in by_sample.values()]
                tallies["mean_score"] = sum(sample_means) / len(sample_means)
            else:
                tallies["mean_score"] = None
        else:
            flagged = {j.sample_id for j in session.judgments if j.hallucination}
            reviewed = len(judged_samples)
            tallies["flagged"] = len(flagged)
            tallies["reviewed"] = reviewed
            tallies["flagged_fraction"] = len(flagged) / reviewed if reviewed else 0.0
            tallies["gate"] = "reject" if 10 * len(flagged) > reviewed else "accept"
        return tallies

    def session_report(self, session_id: str) -> dict:
        session = self._load(session_id)
        report: dict = {
            "session_id": session.id,
            "dataset": session.dataset,
            "kind": session.kind,
            "status": session.status,
            "partial": not session.complete,
            "progress": self._progress(session),
        }
        if session.complete and session.sample_ids:
            if session.kind == review.RUBRIC_KIND:
                score = review.score_dataset(session)
                report.update(
                    mean_score=score.mean_score,
                    yes_rates=score.yes_rates,
                    n=score.n,
                )
            else:
                gate = review.finetune_gate(session)
                report.update(
                    gate=gate.decision,
                    flagged=gate.flagged,
                    reviewed=gate.reviewed,
                    flagged_fraction=gate.flagged_fraction,
                )
        else:
            report.update(tallies=self._tallies(session))
        return report
