from __future__ import annotations

import json
from pathlib import Path

import pytest

from pintkit.corpus import DatasetSpec, Document


def write_jsonl(path: Path, records: list[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return path


def make_docs(count: int, prefix: str = "doc", text: str = "hello world") -> list[Document]:
    return [Document(id=f"{prefix}-{i:04d}", source="test", text=text) for i in range(count)]


@pytest.fixture
def dataset_dir(tmp_path: Path) -> Path:
    """A data root holding one ingested dataset named "demo" with 50 docs."""
    records = []
    for i in range(50):
        # Lengths ramp up so the 95th-percentile tail is well defined.
        body = ("word " * (5 + i)).strip()
        records.append({"id": f"d{i:03d}", "text": body, "source": "demo"})
    write_jsonl(tmp_path / "datasets" / "demo" / "000.jsonl", records)
    return tmp_path


def spec_for(paths: list[Path], order: str = "file_order", **kw) -> DatasetSpec:
    return DatasetSpec(name="test", role="web", inputs=[str(p) for p in paths], order=order, **kw)
