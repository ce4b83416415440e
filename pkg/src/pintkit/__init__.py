"""Corpus curation and tokenizer engineering toolkit.

Subpackages:
    corpus     -- manifest-driven ingestion, ordering, token-budget subsampling
    clean      -- per-source text cleaning rules and quality heuristics
    review     -- statistical sampling, rubric scoring, dataset gates
    mix        -- token-budget corpus mixing and proportion reports
    tokkit     -- BPE encoding, vocabulary extension, BPC math
    modelmath  -- parameter counts, LR schedule, throughput/duration math
    interface  -- CLI entry point and the review HTTP service
"""

__version__ = "0.1.0"
