"""Statistical sampling, human rubric scoring, and dataset acceptance gates.

Datasets are judged on a random sample sized by the population-sampling
formula n = ceil(z^2 * p * (1-p) / e^2). Pre-training candidates get a
three-attribute yes/no rubric (expository +2, toxic -2, clean +1); fine-tune
and alignment candidates get a hallucination check over their longest
samples and are rejected when more than 10% are flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Sequence

RUBRIC_KIND = "pretrain_rubric"
HALLUCINATION_KIND = "finetune_hallucination"
SESSION_KINDS = (RUBRIC_KIND, HALLUCINATION_KIND)

EXPOSITORY_POINTS = 2
TOXIC_POINTS = -2
CLEAN_POINTS = 1

# Reject a fine-tune dataset when flagged/reviewed > 1/10, compared in
# integers so the boundary cannot wobble in float.
GATE_FLAG_NUMERATOR = 1
GATE_FLAG_DENOMINATOR = 10

DEFAULT_Z = 1.96  # 95% confidence
DEFAULT_PROPORTION = 0.5
DEFAULT_MARGIN = 0.05


class ReviewError(ValueError):
    pass


@dataclass(frozen=True)
class SamplingParams:
    z_value: float = DEFAULT_Z
    proportion: float = DEFAULT_PROPORTION
    margin: float = DEFAULT_MARGIN

    def validate(self) -> None:
        if not self.z_value > 0:
            raise ReviewError("z_value must be > 0")
        if not 0 < self.proportion < 1:
            raise ReviewError("proportion must be in (0, 1)")
        if not 0 < self.margin <= 1:
            raise ReviewError("margin must be in (0, 1]")


def required_sample_size(params: SamplingParams = SamplingParams()) -> int:
    """Least sample size for the given confidence Z, proportion, and margin."""
    params.validate()
    z, p, e = params.z_value, params.proportion, params.margin
    return math.ceil(z * z * p * (1.0 - p) / (e * e))


_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG: tiny, well-specified, identical across platforms."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), by rejection to avoid modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n


def draw_sample(population_ids: Sequence[str], n: int, seed: int) -> list[str]:
    """Uniform sample without replacement; deterministic in (order, n, seed).

    Uses a partial Fisher-Yates shuffle over SplitMix64 so the same inputs
    reproduce byte-identical output across processes and platforms.
    """
    if n < 0:
        raise ReviewError("n must be >= 0")
    size = len(population_ids)
    k = min(n, size)
    if k == 0:
        return []
    rng = SplitMix64(seed)
    indices = list(range(size))
    for i in range(k):
        j = i + rng.below(size - i)
        indices[i], indices[j] = indices[j], indices[i]
    return [population_ids[indices[i]] for i in range(k)]


@dataclass(frozen=True)
class Judgment:
    """One judge's verdict on one sample; exactly one attribute group is set."""

    sample_id: str
    judge_id: str
    expository: bool | None = None
    toxic: bool | None = None
    clean: bool | None = None
    hallucination: bool | None = None
    timestamp: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def __post_init__(self):
        rubric = [self.expository, self.toxic, self.clean]
        has_rubric = all(v is not None for v in rubric)
        no_rubric = all(v is None for v in rubric)
        if has_rubric == (self.hallucination is not None) or not (has_rubric or no_rubric):
            raise ReviewError(
                "judgment must set either the rubric triple or the hallucination flag"
            )

    @property
    def kind(self) -> str:
        return HALLUCINATION_KIND if self.hallucination is not None else RUBRIC_KIND

    @classmethod
    def rubric(
        cls, sample_id: str, judge_id: str, expository: bool, toxic: bool, clean: bool, **kw
    ) -> "Judgment":
        return cls(sample_id, judge_id, expository=expository, toxic=toxic, clean=clean, **kw)

    @classmethod
    def flag(cls, sample_id: str, judge_id: str, hallucination: bool, **kw) -> "Judgment":
        return cls(sample_id, judge_id, hallucination=hallucination, **kw)


def score_sample(judgment: Judgment) -> int:
    """Rubric points: expository +2, toxic -2, clean +1."""
    if judgment.kind != RUBRIC_KIND:
        raise ReviewError("score_sample requires a rubric judgment")
    return (
        EXPOSITORY_POINTS * int(judgment.expository)
        + TOXIC_POINTS * int(judgment.toxic)
        + CLEAN_POINTS * int(judgment.clean)
    )


@dataclass
class ReviewSession:
    id: str
    dataset: str
    kind: str
    seed: int
    sample_ids: list[str]
    judges: list[str]
    judgments: list[Judgment] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in SESSION_KINDS:
            raise ReviewError(f"unknown session kind {self.kind!r}")
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise ReviewError("sample_ids must be unique")
        if not self.judges:
            raise ReviewError("session needs at least one enrolled judge")

    def record(self, judgment: Judgment) -> None:
        """Append a judgment; never mutates or removes prior ones."""
        if judgment.kind != self.kind:
            raise ReviewError(
                f"judgment kind {judgment.kind} does not match session kind {self.kind}"
            )
        if judgment.sample_id not in self._sample_set():
            raise ReviewError(f"sample {judgment.sample_id!r} is not part of this session")
        if judgment.judge_id not in self.judges:
            raise ReviewError(f"judge {judgment.judge_id!r} is not enrolled")
        if any(
            j.sample_id == judgment.sample_id and j.judge_id == judgment.judge_id
            for j in self.judgments
        ):
            raise ReviewError("duplicate judgment for this (judge, sample) pair")
        self.judgments.append(judgment)

    def _sample_set(self) -> set[str]:
        return set(self.sample_ids)

    def judged_by(self, judge_id: str) -> set[str]:
        return {j.sample_id for j in self.judgments if j.judge_id == judge_id}

    @property
    def complete(self) -> bool:
        """Every sample has at least one judgment from every enrolled judge."""
        if not self.sample_ids:
            return True
        samples = self._sample_set()
        return all(samples <= self.judged_by(judge) for judge in self.judges)

    @property
    def status(self) -> str:
        return "complete" if self.complete else "open"


@dataclass(frozen=True)
class DatasetScore:
    dataset: str
    n: int
    mean_score: float
    yes_rates: dict[str, float]


def score_dataset(session: ReviewSession) -> DatasetScore:
    """Mean rubric score: per-sample average over judges, then over samples."""
    if session.kind != RUBRIC_KIND:
        raise ReviewError("score_dataset requires a pretrain_rubric session")
    if not session.complete:
        raise ReviewError(f"session {session.id!r} is not complete")
    by_sample: dict[str, list[Judgment]] = {}
    for judgment in session.judgments:
        by_sample.setdefault(judgment.sample_id, []).append(judgment)

    sample_means = []
    attr_means: dict[str, list[float]] = {"expository": [], "toxic": [], "clean": []}
    for sample_id in session.sample_ids:
        group = by_sample[sample_id]
        sample_means.append(sum(score_sample(j) for j in group) / len(group))
        for attr in attr_means:
            attr_means[attr].append(sum(int(getattr(j, attr)) for j in group) / len(group))

    n = len(session.sample_ids)
    return DatasetScore(
        dataset=session.dataset,
        n=n,
        mean_score=sum(sample_means) / n,
        yes_rates={attr: sum(vals) / n for attr, vals in attr_means.items()},
    )


@dataclass(frozen=True)
class Selection:
    """Datasets chosen for a role target, in pick order, with token totals."""

    selected: list[str]
    allocations: dict[str, int]
    total_tokens: int
    shortfall: int  # tokens missing when the target exceeded what was available


def select_datasets(
    scores: Iterable[DatasetScore],
    token_counts: dict[str, int],
    role_target: int,
) -> Selection:
    """Take whole datasets, best mean score first, until the target is met.

    Ties break toward the larger token count, then name ascending. The
    dataset that crosses the target is included whole; if everything runs
    out first the shortfall is reported rather than raised.
    """
    if role_target < 0:
        raise ReviewError("role_target must be >= 0")
    scores = list(scores)
    missing = [s.dataset for s in scores if s.dataset not in token_counts]
    if missing:
        raise ReviewError(f"no token counts for dataset(s): {missing}")

    ranked = sorted(
        scores,
        key=lambda s: (-s.mean_score, -token_counts[s.dataset], s.dataset),
    )
    selected: list[str] = []
    allocations: dict[str, int] = {}
    total = 0
    for score in ranked:
        if total >= role_target:
            break
        tokens = token_counts[score.dataset]
        selected.append(score.dataset)
        allocations[score.dataset] = tokens
        total += tokens
    shortfall = max(role_target - total, 0)
    return Selection(selected=selected, allocations=allocations, total_tokens=total, shortfall=shortfall)


def p95_threshold(lengths: Sequence[int]) -> int:
    """Nearest-rank 95th percentile: sorted ascending, 1-based index ceil(.95 n)."""
    if not lengths:
        raise ReviewError("p95_threshold needs a non-empty list")
    ordered = sorted(lengths)
    rank = -(-95 * len(ordered) // 100)  # ceil(0.95 * n) in exact integers
    return ordered[rank - 1]


def top_tail_ids(lengths_by_id: dict[str, int]) -> list[str]:
    """Ids whose length is at or above the 95th-percentile threshold."""
    threshold = p95_threshold(list(lengths_by_id.values()))
    return [doc_id for doc_id, length in lengths_by_id.items() if length >= threshold]


@dataclass(frozen=True)
class GateResult:
    decision: str  # "accept" or "reject"
    flagged: int
    reviewed: int

    @property
    def flagged_fraction(self) -> float:
        return self.flagged / self.reviewed if self.reviewed else 0.0


def finetune_gate(session: ReviewSession) -> GateResult:
    """Reject when strictly more than 10% of reviewed samples are flagged."""
    if session.kind != HALLUCINATION_KIND:
        raise ReviewError("finetune_gate requires a finetune_hallucination session")
    if not session.complete:
        raise ReviewError(f"session {session.id!r} is not complete")
    flagged_samples = set()
    for judgment in session.judgments:
        if judgment.hallucination:
            flagged_samples.add(judgment.sample_id)
    flagged = len(flagged_samples)
    reviewed = len(session.sample_ids)
    reject = GATE_FLAG_DENOMINATOR * flagged > GATE_FLAG_NUMERATOR * reviewed
    return GateResult(decision="reject" if reject else "accept", flagged=flagged, reviewed=reviewed)
