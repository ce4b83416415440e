"""Acceptance suite: one test per release criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside pytest's own output.
"""

from __future__ import annotations

import functools
import itertools
import json
import random
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest

from pintkit.clean import CleaningRule, Dropped, apply_rules
from pintkit.corpus import Document, subsample_by_budget
from pintkit.interface.service import ReviewService
from pintkit.interface.store import SessionStore
from pintkit.mix import report_proportions
from pintkit.modelmath import ModelConfig, ScheduleConfig, lr_at, param_count
from pintkit.review import (
    Judgment,
    ReviewSession,
    SamplingParams,
    draw_sample,
    p95_threshold,
    required_sample_size,
    score_sample,
)
from pintkit.tokkit import BpcInput, bpc, compare_counts, encode, extend_vocab, reserved_count

from conftest import write_jsonl
from test_clean import IDEMPOTENT_RULES, _fuzz_doc
from test_mix import REFERENCE_COUNTS, REFERENCE_ROLES
from test_tokkit import flat_vocab, oracle_encode, random_merge_table


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[acceptance] {name}: FAIL")
                raise
            print(f"[acceptance] {name}: PASS")

        return wrapper

    return decorate


@criterion("sample-size-385")
def test_sample_size():
    assert required_sample_size(SamplingParams(1.96, 0.5, 0.05)) == 385


@criterion("parameter-count-1565886464")
def test_parameter_count():
    cfg = ModelConfig(
        vocab_size=32_064,
        d_model=2048,
        n_layers=24,
        n_heads=32,
        n_kv_groups=4,
        d_intermediate=8192,
        context_length=16_384,
        tie_embeddings=False,
    )
    assert param_count(cfg) == 1_565_886_464


@criterion("vocab-extension-32064")
def test_vocab_extension():
    extended = extend_vocab(flat_vocab(32_000), multiple=64)
    assert extended.size == 32_064
    assert reserved_count(extended) == 49
    assert extended.size % 64 == 0


@criterion("token-reduction-3.61")
def test_token_reduction():
    assert compare_counts(24_131_968_012, 23_261_356_142) == 3.61


@criterion("mix-report-percentages")
def test_mix_report():
    report = report_proportions(REFERENCE_COUNTS, REFERENCE_ROLES)
    expected = {
        ("dataset", "arxiv"): 17.31,
        ("dataset", "wikipedia"): 9.64,
        ("dataset", "falcon-refinedweb"): 40.07,
        ("dataset", "starcoder"): 22.13,
        ("role", "textbook"): 37.80,
    }
    for (scope, name), value in expected.items():
        got = report.per_dataset[name] if scope == "dataset" else report.per_role[name]
        assert abs(got - value) <= 0.01, f"{name}: {got} vs {value}"


@criterion("lr-schedule")
def test_lr_schedule():
    cfg = ScheduleConfig(max_lr=4.0e-4, min_lr=4.0e-5, warmup_steps=2000, total_steps=10_000)
    assert lr_at(cfg, 2000) == 4.0e-4
    final = lr_at(cfg, cfg.total_steps)
    assert abs(final - 4.0e-5) < 1e-12 * 4.0e-5
    midpoint = (cfg.warmup_steps + cfg.total_steps) // 2
    assert lr_at(cfg, midpoint) == pytest.approx(2.2e-4, rel=1e-12)

    rng = random.Random(2718)
    for _ in range(200):
        warmup = rng.randint(0, 100)
        total = warmup + rng.randint(1, 400)
        min_lr = rng.uniform(1e-6, 1e-3)
        sched = ScheduleConfig(
            max_lr=min_lr * rng.uniform(1.0, 100.0),
            min_lr=min_lr,
            warmup_steps=warmup,
            total_steps=total,
        )
        if warmup > 0:
            assert lr_at(sched, warmup) == pytest.approx(sched.max_lr, rel=1e-12)
        decay = [lr_at(sched, s) for s in range(warmup, total + 1)]
        assert all(a >= b for a, b in zip(decay, decay[1:]))
        assert abs(decay[-1] - sched.min_lr) <= 1e-12 * sched.min_lr


@criterion("bits-per-character")
def test_bpc():
    assert bpc(BpcInput([1.0] * 8, 8)) == 1.0
    assert bpc(BpcInput([0.0] * 8, 8)) == 0.0
    rng = random.Random(314)
    for _ in range(1000):
        losses = [rng.uniform(0.0, 10.0) for _ in range(rng.randint(1, 50))]
        chars = rng.randint(1, 400)
        scale = rng.uniform(0.01, 20.0)
        assert bpc(BpcInput([l * scale for l in losses], chars)) == pytest.approx(
            scale * bpc(BpcInput(losses, chars)), rel=1e-12
        )


@criterion("review-gates")
def test_review_gates():
    def gate(flagged, total):
        session = ReviewSession(
            id="g", dataset="d", kind="finetune_hallucination", seed=0,
            sample_ids=[f"s{i}" for i in range(total)], judges=["j1"],
        )
        for i in range(total):
            session.record(Judgment.flag(f"s{i}", "j1", i < flagged))
        from pintkit.review import finetune_gate

        return finetune_gate(session).decision

    assert gate(38, 385) == "accept"
    assert gate(39, 385) == "reject"

    for e, t, c in itertools.product((False, True), repeat=3):
        judgment = Judgment.rubric("s", "j", e, t, c)
        assert score_sample(judgment) == 2 * int(e) - 2 * int(t) + int(c)


@criterion("percentile-oracle")
def test_percentile_oracle():
    import math

    rng = random.Random(1618)
    for _ in range(1000):
        lengths = [rng.randint(1, 100_000) for _ in range(rng.randint(1, 500))]
        ordered = sorted(lengths)
        expected = ordered[math.ceil(0.95 * len(ordered)) - 1]
        assert p95_threshold(lengths) == expected


@criterion("cleaning-rules")
def test_cleaning():
    doc = Document(id="x", source="t", text="a" * 999)
    assert apply_rules(doc, [CleaningRule.min_chars(1000)]) == Dropped("min_chars", doc_id="x")
    doc = Document(id="x", source="t", text="a" * 1000)
    assert isinstance(apply_rules(doc, [CleaningRule.min_chars(1000)]), Document)

    lines = "\n".join(f"line {i:03d}" for i in range(1, 301))
    stripped = apply_rules(
        Document(id="b", source="t", text=lines), [CleaningRule.strip_first_lines(200)]
    )
    assert isinstance(stripped, Document)
    assert stripped.text.split("\n")[0] == "line 201"
    assert len(stripped.text.split("\n")) == 100

    rng = random.Random(0xC0FFEE)
    for i in range(100):
        doc = Document(id=f"f{i}", source="t", text=_fuzz_doc(rng))
        once = apply_rules(doc, IDEMPOTENT_RULES)
        assert isinstance(once, Document)
        twice = apply_rules(once, IDEMPOTENT_RULES)
        assert isinstance(twice, Document) and twice.text == once.text


@criterion("bpe-oracle-exhaustive")
def test_bpe_oracle_exhaustive():
    # Every string of length <= 8 over {a, b, c}, against randomized tables.
    alphabet = "abc"
    all_strings = [
        "".join(s)
        for length in range(0, 9)
        for s in itertools.product(alphabet, repeat=length)
    ]
    assert len(all_strings) == 9841
    rng = random.Random(40_000)
    tables = [random_merge_table(rng, rng.randint(1, 15)) for _ in range(3)]
    for tok in tables:
        for text in all_strings:
            assert encode(tok, text) == oracle_encode(tok, text), (tok.merges, text)


_DETERMINISM_SNIPPET = """
import json
from pintkit.corpus import Document, subsample_by_budget
from pintkit.review import draw_sample

population = [f"id-{i}" for i in range(5000)]
sample = draw_sample(population, 385, seed=20240601)
docs = [Document(id=str(i), source="s", text="w " * (i % 17 + 1)) for i in range(500)]
stream = subsample_by_budget(iter(docs), 1000, lambda d: len(d.text.split()))
emitted = [d.id for d in stream]
print(json.dumps({"sample": sample, "emitted": emitted, "total": stream.total_tokens}))
"""


@criterion("cross-process-determinism")
def test_cross_process_determinism():
    runs = [
        subprocess.run(
            [sys.executable, "-c", _DETERMINISM_SNIPPET],
            capture_output=True,
            check=True,
            timeout=120,
        ).stdout
        for _ in range(2)
    ]
    assert runs[0] == runs[1]
    assert b"sample" in runs[0]


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def _wait_for_server(port: int, timeout: float = 30.0) -> None:
    import httpx

    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            if httpx.get(f"http://127.0.0.1:{port}/healthz", timeout=2.0).status_code == 200:
                return
        except Exception:
            time.sleep(0.2)
    raise RuntimeError("server did not come up")


@criterion("crash-recovery")
def test_crash_recovery(tmp_path: Path):
    import httpx

    records = [{"id": f"d{i:02d}", "text": f"sample text {i} " * (i + 1)} for i in range(20)]
    write_jsonl(tmp_path / "datasets" / "demo" / "000.jsonl", records)

    port = _free_port()
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "pintkit.interface.cli",
            "serve", "--port", str(port), "--data", str(tmp_path),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        _wait_for_server(port)
        base = f"http://127.0.0.1:{port}"
        created = httpx.post(
            base + "/sessions",
            json={"dataset": "demo", "kind": "pretrain_rubric", "n": 10, "seed": 7, "judges": ["j1"]},
            timeout=10.0,
        ).json()
        session_id = created["id"]

        verdicts = [(True, False, True), (False, False, True), (True, True, False), (False, False, False)]
        for (e, t, c) in verdicts:  # K = 4 judgments, then the crash
            nxt = httpx.get(base + f"/sessions/{session_id}/next", params={"judge": "j1"}, timeout=10.0).json()
            assert not nxt["done"]
            ack = httpx.post(
                base + f"/sessions/{session_id}/judgments",
                json={"sample_id": nxt["sample"]["id"], "judge_id": "j1", "expository": e, "toxic": t, "clean": c},
                timeout=10.0,
            )
            assert ack.status_code == 200
        before = httpx.get(base + f"/sessions/{session_id}/report", timeout=10.0).json()
    finally:
        proc.kill()  # SIGKILL: no shutdown hooks, the log alone must suffice
        proc.wait(timeout=30)

    replayed = ReviewService(SessionStore(tmp_path)).session_report(session_id)
    assert json.dumps(replayed, sort_keys=True) == json.dumps(before, sort_keys=True)

    # A restarted server over the same directory serves the same report.
    port2 = _free_port()
    proc2 = subprocess.Popen(
        [
            sys.executable, "-m", "pintkit.interface.cli",
            "serve", "--port", str(port2), "--data", str(tmp_path),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        _wait_for_server(port2)
        after = httpx.get(f"http://127.0.0.1:{port2}/sessions/{session_id}/report", timeout=10.0).json()
        assert json.dumps(after, sort_keys=True) == json.dumps(before, sort_keys=True)
    finally:
        proc2.kill()
        proc2.wait(timeout=30)
