"""The `pint` command line: corpus, review, mixing, tokenizer, and math tools.

Subcommands: ingest, clean, sample, score, gate, mix, tok, params, lr,
duration, serve. The data root for review commands comes from --data, the
PINT_DATA_DIR environment variable, or ./pint_data, in that order.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from pintkit import clean as cleanmod
from pintkit import corpus, mix, modelmath, review, tokkit

from .service import ApiError, ReviewService
from .store import SessionStore, default_data_dir


def _err(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _token_counter(tokenizer_path: str | None):
    if tokenizer_path:
        tok = tokkit.load_tokenizer(tokenizer_path)
        return lambda doc: len(tokkit.encode(tok, doc.text))
    return corpus.whitespace_token_count


# -- ingest ---------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    manifest = corpus.load_manifest(args.manifest)
    spec = manifest.dataset(args.dataset)
    reader = corpus.read_documents(spec, base_dir=args.base_dir)
    out_path = Path(args.out) / f"{spec.name}.jsonl"

    budget = args.budget if args.budget is not None else spec.token_budget
    if budget is not None:
        stream = corpus.subsample_by_budget(iter(reader), budget, _token_counter(args.tokenizer))
        written = corpus.write_documents(stream, out_path)
        print(f"wrote {written} docs, {stream.total_tokens} tokens (budget {budget}) -> {out_path}")
    else:
        written = corpus.write_documents(iter(reader), out_path)
        print(f"wrote {written} docs -> {out_path}")
    if reader.skipped:
        print(f"skipped {reader.skipped} malformed record(s)", file=sys.stderr)
        for line in reader.errors[:20]:
            print(f"  {line}", file=sys.stderr)
    return 0


# -- clean ----------------------------------------------------------------


def _read_dir_documents(directory: str, source: str):
    for path in sorted(Path(directory).glob("*.jsonl")):
        spec = corpus.DatasetSpec(name=source, role="web", inputs=[str(path)])
        yield from corpus.read_documents(spec)


def cmd_clean(args: argparse.Namespace) -> int:
    manifest = corpus.load_manifest(args.manifest)
    spec = manifest.dataset(args.dataset)
    rules = [cleanmod.CleaningRule.from_spec(r) for r in spec.cleaning_rules]
    stats = cleanmod.CleaningStats()
    docs = cleanmod.clean_stream(_read_dir_documents(args.in_dir, spec.name), rules, stats)
    out_path = Path(args.out) / f"{spec.name}.jsonl"
    corpus.write_documents(docs, out_path)

    lines = [f"dataset: {spec.name}"] + stats.report_lines()
    report = "\n".join(lines) + "\n"
    if args.report:
        Path(args.report).write_text(report, encoding="utf-8")
    print(report, end="")
    return 0


# -- review sessions ------------------------------------------------------


def _service(args: argparse.Namespace) -> ReviewService:
    return ReviewService(SessionStore(default_data_dir(args.data)))


def cmd_sample(args: argparse.Namespace) -> int:
    service = _service(args)
    n = args.n if args.n == "auto" else int(args.n)
    try:
        session, warnings, created = service.create_session(
            dataset=args.dataset,
            kind=args.kind,
            n=n,
            seed=args.seed,
            judges=args.judges.split(","),
        )
    except ApiError as exc:
        return _err(f"{exc.code}: {exc.message}")
    verb = "created" if created else "already exists"
    print(f"session {session.id} {verb}: {len(session.sample_ids)} samples, judges {session.judges}")
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    try:
        report = _service(args).session_report(args.session)
    except ApiError as exc:
        return _err(f"{exc.code}: {exc.message}")
    print(json.dumps(report, indent=2))
    return 0


def cmd_gate(args: argparse.Namespace) -> int:
    service = _service(args)
    try:
        report = service.session_report(args.session)
    except ApiError as exc:
        return _err(f"{exc.code}: {exc.message}")
    if report["kind"] != review.HALLUCINATION_KIND:
        return _err(f"session {args.session} is not a fine-tune hallucination session")
    print(json.dumps(report, indent=2))
    return 0


# -- mix ------------------------------------------------------------------


def _load_counts(path: str, manifest: corpus.Manifest | None) -> dict[str, mix.AvailableDataset]:
    roles = {d.name: d.role for d in manifest.datasets} if manifest else {}
    available: dict[str, mix.AvailableDataset] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            name = str(obj["dataset"])
            role = str(obj.get("role") or roles.get(name, ""))
            if not role:
                raise ValueError(f"dataset {name!r}: no role in counts file or manifest")
            available[name] = mix.AvailableDataset(
                role=role, tokens=int(obj["tokens"]), score=float(obj.get("score", 0.0))
            )
    return available


def cmd_mix(args: argparse.Namespace) -> int:
    manifest = corpus.load_manifest(args.manifest)
    available = _load_counts(args.counts, manifest)
    plan = mix.plan_mix(available, manifest.target_proportions, manifest.total_token_target)

    with open(args.out, "w", encoding="utf-8") as fh:
        for name, tokens in sorted(plan.allocations.items()):
            fh.write(json.dumps({"dataset": name, "role": available[name].role, "tokens": tokens}) + "\n")

    print(f"grand total: {plan.grand_total} tokens")
    for role, tokens in sorted(plan.role_totals.items()):
        pct = 100.0 * plan.realized_proportions.get(role, 0.0)
        print(f"  {role:<10} {tokens:>16}  {pct:6.2f}%")
    for warning in plan.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    counts = {name: entry.tokens for name, entry in available.items() if name in plan.allocations}
    roles = {name: available[name].role for name in counts}
    table = mix.report_proportions(counts, roles)
    print("\n".join(table.lines()))
    return 0


# -- tok ------------------------------------------------------------------


def cmd_tok_extend(args: argparse.Namespace) -> int:
    tok = tokkit.load_tokenizer(args.in_path)
    chat = list(tokkit.STANDARD_CHAT_TOKENS) if args.chat_preset == "standard" else list(args.chat or [])
    extended = tokkit.extend_vocab(tok, pad_literal=args.pad, chat_literals=chat, multiple=args.multiple)
    tokkit.save_tokenizer(extended, args.out)
    print(
        f"extended {tok.size} -> {extended.size} "
        f"(pad {'1' if args.pad else '0'}, chat {len(chat)}, reserved {tokkit.reserved_count(extended)})"
    )
    return 0


def cmd_tok_count(args: argparse.Namespace) -> int:
    tok = tokkit.load_tokenizer(args.tokenizer)
    total = tokkit.count_tokens(tok, _read_dir_documents(args.in_dir, "count"))
    print(total)
    return 0


def cmd_tok_compare(args: argparse.Namespace) -> int:
    print(f"{tokkit.compare_counts(args.a, args.b):.2f}")
    return 0


def cmd_tok_bpc(args: argparse.Namespace) -> int:
    losses = [float(line) for line in Path(args.losses).read_text().split()]
    print(tokkit.bpc(tokkit.BpcInput(token_losses=losses, char_count=args.chars)))
    return 0


# -- model math -----------------------------------------------------------


def _load_yaml(path: str) -> dict:
    obj = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a mapping")
    return obj


def cmd_params(args: argparse.Namespace) -> int:
    obj = _load_yaml(args.config)
    cfg = modelmath.ModelConfig(
        vocab_size=int(obj["vocab_size"]),
        d_model=int(obj["d_model"]),
        n_layers=int(obj["n_layers"]),
        n_heads=int(obj["n_heads"]),
        n_kv_groups=int(obj["n_kv_groups"]),
        d_intermediate=int(obj["d_intermediate"]),
        context_length=int(obj["context_length"]),
        tie_embeddings=bool(obj.get("tie_embeddings", False)),
    )
    print(f"{modelmath.param_count(cfg):,}")
    return 0


def _schedule_from(obj: dict) -> modelmath.ScheduleConfig:
    return modelmath.ScheduleConfig(
        max_lr=float(obj["max_lr"]),
        min_lr=float(obj["min_lr"]),
        warmup_steps=int(obj["warmup_steps"]),
        total_steps=int(obj["total_steps"]),
    )


def cmd_lr(args: argparse.Namespace) -> int:
    cfg = _schedule_from(_load_yaml(args.config))
    if args.csv:
        print("step,lr")
        for step, lr in modelmath.schedule_table(cfg):
            print(f"{step},{lr:.10g}")
        return 0
    if args.step is None:
        return _err("--step is required unless --csv is given")
    print(f"{modelmath.lr_at(cfg, args.step):.10g}")
    return 0


def cmd_duration(args: argparse.Namespace) -> int:
    seconds = modelmath.duration_estimate(args.tokens, args.gpus, args.throughput)
    print(f"{seconds:.1f} s ({modelmath.format_duration(seconds)})")
    return 0


# -- serve ----------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import run_server

    ui_dir = args.ui
    if ui_dir is None:
        candidate = Path("frontend/dist")
        ui_dir = candidate if candidate.is_dir() else None
    run_server(default_data_dir(args.data), host=args.host, port=args.port, ui_dir=ui_dir)
    return 0


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pint", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read a raw dataset into normalized document files")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=int, default=None, help="token budget (overrides manifest)")
    p.add_argument("--tokenizer", default=None, help="tokenizer file for budget counting (default: whitespace)")
    p.add_argument("--base-dir", default=None, help="resolve relative input paths against this directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("clean", help="apply a dataset's cleaning rules")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="write per-rule drop counts here")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("sample", help="create a review session with a drawn sample")
    p.add_argument("--dataset", required=True)
    p.add_argument("--n", default="auto", help='"auto" or an integer')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", default=review.RUBRIC_KIND, choices=review.SESSION_KINDS)
    p.add_argument("--judges", default="judge-1", help="comma-separated judge ids")
    p.add_argument("--data", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("score", help="report a session's score")
    p.add_argument("--session", required=True)
    p.add_argument("--data", default=None)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("gate", help="report a fine-tune session's accept/reject gate")
    p.add_argument("--session", required=True)
    p.add_argument("--data", default=None)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("mix", help="plan a corpus mix to the manifest's proportions")
    p.add_argument("--manifest", required=True)
    p.add_argument("--counts", required=True, help="JSONL: {dataset, tokens[, role][, score]}")
    p.add_argument("--out", required=True, help="plan file (JSONL, one allocation per line)")
    p.set_defaults(func=cmd_mix)

    tok = sub.add_parser("tok", help="tokenizer tools")
    tok_sub = tok.add_subparsers(dest="tok_command", required=True)

    p = tok_sub.add_parser("extend", help="add pad/chat/reserved tokens, padded to a multiple")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--pad", default=tokkit.DEFAULT_PAD_TOKEN)
    p.add_argument("--chat-preset", choices=["standard", "none"], default="standard")
    p.add_argument("--chat", nargs="*", default=None, help="explicit chat literals (with --chat-preset none)")
    p.add_argument("--multiple", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tok_extend)

    p = tok_sub.add_parser("count", help="count tokens over a directory of document files")
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--in", dest="in_dir", required=True)
    p.set_defaults(func=cmd_tok_count)

    p = tok_sub.add_parser("compare", help="percent reduction of count b vs count a")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(func=cmd_tok_compare)

    p = tok_sub.add_parser("bpc", help="bits per character from a per-token loss file")
    p.add_argument("--losses", required=True, help="file with one loss (bits) per line")
    p.add_argument("--chars", type=int, required=True)
    p.set_defaults(func=cmd_tok_bpc)

    p = sub.add_parser("params", help="exact parameter count for a model config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("lr", help="learning rate at a step, or a CSV of the schedule")
    p.add_argument("--config", required=True)
    p.add_argument("--step", type=int, default=None)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_lr)

    p = sub.add_parser("duration", help="wall-clock estimate for a token count")
    p.add_argument("--tokens", type=int, required=True)
    p.add_argument("--gpus", type=int, required=True)
    p.add_argument("--throughput", type=float, required=True, help="tokens/GPU/s")
    p.set_defaults(func=cmd_duration)

    p = sub.add_parser("serve", help="run the review HTTP service")
    p.add_argument("--port", type=int, default=8551)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", default=None)
    p.add_argument("--ui", default=None, help="static UI directory (default: frontend/dist if present)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (corpus.ManifestError, cleanmod.RuleError, mix.MixError, tokkit.TokenizerError, modelmath.ConfigError, ValueError) as exc:
        return _err(str(exc))


if __name__ == "__main__":
    sys.exit(main())
