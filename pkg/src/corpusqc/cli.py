"""Command-line pipeline: ingest, curate, scan, build-dataset, score,
compare, report.

Every stage reads and writes JSONL so stages can be chained, rerun, or
swapped out. Exit codes: 0 success, 1 validation or input error, 2 quality
gate tripped.
"""

from __future__ import annotations

import argparse
import sys
from itertools import combinations
from multiprocessing import Pool
from pathlib import Path

from . import __version__
from .config import ConfigError, PipelineConfig, config_snapshot, load_config
from .curate import (
    CurationConfig,
    RejectRecord,
    curate,
    pair_from_record,
    pair_to_record,
    reject_to_record,
)
from .dataset import VARIANTS, assignment_to_record, emit, mark_cleaned, split
from .ingest import EncodingError, IoError, iter_corpus, raw_function_from_record, raw_function_to_record
from .jsonl import JsonlWriter, read_jsonl, write_json, write_jsonl
from .metrics import (
    DuplicateId,
    metric_tokens,
    pass_rate,
    score_generations,
    summarize_scores,
    trivially_shared_ngrams,
)
from .qualscan import (
    PatternError,
    builtin_rules,
    combine_rulesets,
    load_ruleset,
    scan_code,
    verdict_to_record,
)
from .report import (
    MismatchedIds,
    breakdown,
    comparison_table,
    render_markdown,
    sankey_data,
)
from .stats import compare_models

_GATE_RANK = {"info": 0, "warning": 1, "error": 2}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's 2
        raise _UsageError(message)


def _resolve_rules(specs: list[str]):
    rulesets = []
    for spec in specs or ["builtin"]:
        if spec == "builtin":
            rulesets.append(builtin_rules())
        else:
            rulesets.append(load_ruleset(spec))
    return combine_rulesets(*rulesets)


def _curation_config(cfg: PipelineConfig) -> CurationConfig:
    return CurationConfig(
        min_words=cfg.min_words,
        max_description_tokens=cfg.max_description_tokens,
        max_code_tokens=cfg.max_code_tokens,
        max_code_chars=cfg.max_code_chars,
    )


# -- subcommands -----------------------------------------------------------


def cmd_ingest(args, cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    rejects: list[dict] = []
    stats = {"files": 0, "functions": 0}

    def records():
        for result in iter_corpus(args.paths):
            stats["files"] += 1
            if result.reject is not None:
                rejects.append({"path": result.reject.path, "reason": result.reject.reason})
            for func in result.functions:
                stats["functions"] += 1
                yield raw_function_to_record(func)

    write_jsonl(out / "functions.jsonl", records())
    write_jsonl(out / "file_rejects.jsonl", rejects)
    print(
        f"ingest: {stats['functions']} functions from {stats['files']} files "
        f"({len(rejects)} files failed to parse)"
    )
    return 0


def cmd_curate(args, cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    curation = _curation_config(cfg)
    functions = (raw_function_from_record(r) for r in read_jsonl(args.functions))
    kept = 0
    with JsonlWriter(out / "pairs.jsonl") as pairs_out, JsonlWriter(out / "rejects.jsonl") as rejects_out:
        for item in curate(functions, curation):
            if isinstance(item, RejectRecord):
                rejects_out.write(reject_to_record(item))
            else:
                kept += 1
                pairs_out.write(pair_to_record(item))
        rejected = rejects_out.count
    print(f"curate: {kept} pairs kept, {rejected} functions rejected")
    return 0


_WORKER_RULES = None


def _scan_init(rule_specs: list[str]) -> None:
    global _WORKER_RULES
    _WORKER_RULES = _resolve_rules(rule_specs)


def _scan_worker(record: dict) -> dict:
    verdict = scan_code(record["func_id"], record["code"], _WORKER_RULES)
    return verdict_to_record(verdict)


def cmd_scan(args, cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    rule_specs = args.rules or ["builtin"]
    _resolve_rules(rule_specs)  # fail fast on malformed rules
    jobs = cfg.effective_jobs()
    records = read_jsonl(args.pairs)
    statuses: dict[str, int] = {}
    gate = cfg.gate
    gate_hits = 0

    def tally(verdict_record: dict) -> dict:
        nonlocal gate_hits
        statuses[verdict_record["status"]] = statuses.get(verdict_record["status"], 0) + 1
        if gate:
            threshold = _GATE_RANK[gate]
            gate_hits += sum(
                1 for f in verdict_record["findings"] if _GATE_RANK[f["severity"]] >= threshold
            )
        return verdict_record

    if jobs > 1:
        with Pool(jobs, initializer=_scan_init, initargs=(rule_specs,)) as pool:
            write_jsonl(
                out / "verdicts.jsonl",
                (tally(v) for v in pool.imap(_scan_worker, records, chunksize=64)),
            )
    else:
        _scan_init(rule_specs)
        write_jsonl(out / "verdicts.jsonl", (tally(_scan_worker(r)) for r in records))

    total = sum(statuses.values())
    parts = ", ".join(f"{k}={v}" for k, v in sorted(statuses.items()))
    print(f"scan: {total} functions ({parts})")
    if gate and gate_hits:
        print(f"scan: gate '{gate}' tripped by {gate_hits} findings", file=sys.stderr)
        return 2
    return 0


def cmd_build_dataset(args, cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    pairs = [pair_from_record(r) for r in read_jsonl(args.pairs)]
    statuses = {r["func_id"]: r["status"] for r in read_jsonl(args.verdicts)}
    assignments = split(pairs, seed=cfg.seed)
    dropped = mark_cleaned(assignments, statuses)
    write_jsonl(out / "assignments.jsonl", (assignment_to_record(a) for a in assignments))
    variants = VARIANTS if args.variant == "both" else (args.variant,)
    snapshot = config_snapshot(cfg)
    for variant in variants:
        manifest = emit(pairs, assignments, out, variant=variant, seed=cfg.seed, config=snapshot)
        counts = ", ".join(f"{k}={v}" for k, v in manifest.counts.items())
        print(f"build-dataset[{variant}]: {counts}")
    print(f"build-dataset: {dropped} train functions excluded from the cleaned variant")
    return 0


def cmd_score(args, cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    references = {r["func_id"]: r["completion"] for r in read_jsonl(args.references)}
    predictions = [(r["func_id"], r["completion"]) for r in read_jsonl(args.predictions)]
    shared = frozenset()
    if args.shared_from:
        corpus = (metric_tokens(r["completion"]) for r in read_jsonl(args.shared_from))
        shared = trivially_shared_ngrams(corpus, k=cfg.shared_k, max_n=cfg.max_n)
    rules = _resolve_rules(args.rules) if args.scan_predictions else None
    rows = score_generations(
        predictions,
        references,
        shared=shared,
        max_n=cfg.max_n,
        epsilon=cfg.epsilon,
        rules=rules,
    )
    write_jsonl(out / "scores.jsonl", (row.to_record() for row in rows))
    summary = summarize_scores(rows)
    if args.outcomes:
        outcomes = [(r["func_id"], bool(r["passed"])) for r in read_jsonl(args.outcomes)]
        summary["pass_rate"] = pass_rate(outcomes)
    write_json(out / "score_summary.json", summary)
    print(
        "score: n={n} exact_match_rate={em:.4f} crystal_bleu_mean={cb:.4f}".format(
            n=summary["n"], em=summary["exact_match_rate"], cb=summary["crystal_bleu_mean"]
        )
    )
    return 0


def _load_outcomes(spec: str) -> tuple[str, dict]:
    name, sep, path = spec.partition("=")
    if not sep or not name or not path:
        raise ConfigError("outcomes", f"expected NAME=PATH, got {spec!r}")
    values = {}
    for record in read_jsonl(path):
        func_id = record["func_id"]
        if func_id in values:
            raise DuplicateId(f"{name}: duplicate outcome for {func_id!r}")
        values[func_id] = record["value"]
    return name, values


def cmd_compare(args, cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    runs = [_load_outcomes(spec) for spec in args.outcomes]
    if len(runs) < 2:
        raise ConfigError("outcomes", "need at least two outcome files to compare")
    base_ids = set(runs[0][1])
    for name, values in runs[1:]:
        if set(values) != base_ids:
            raise MismatchedIds(f"outcome ids of {name!r} do not match {runs[0][0]!r}")
    ordered_ids = sorted(base_ids, key=str)
    comparisons = []
    for (name_a, values_a), (name_b, values_b) in combinations(runs, 2):
        vec_a = [values_a[i] for i in ordered_ids]
        vec_b = [values_b[i] for i in ordered_ids]
        comparisons.append((f"{name_a}_vs_{name_b}", vec_a, vec_b))
    results = compare_models(comparisons, exact_threshold=cfg.exact_threshold)
    write_json(out / "comparisons.json", {"results": [r.to_record() for r in results]})
    for result in results:
        effect = (
            f" {result.effect_name}={result.effect_size:.4f}" if result.effect_name else ""
        )
        print(
            f"compare: {result.label} {result.test_name} p={result.p_value:.6g} "
            f"adjusted_p={result.adjusted_p:.6g}{effect}"
        )
    return 0


def cmd_report(args, cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    sections: list[str] = []
    if args.verdicts:
        bd = breakdown(read_jsonl(args.verdicts))
        write_json(out / "breakdown.json", bd.to_record(top_k=cfg.top_k))
        write_json(out / "sankey.json", sankey_data(bd))
        sections.append(render_markdown(bd, top_k=cfg.top_k))
    if args.runs:
        runs = {}
        for spec in args.runs:
            name, sep, path = spec.partition("=")
            if not sep:
                raise ConfigError("runs", f"expected NAME=PATH, got {spec!r}")
            runs[name] = read_jsonl(path)
        table = comparison_table(runs)
        write_json(out / "comparison.json", table.to_record())
        sections.append(render_markdown(table))
    if not sections:
        raise ConfigError("report", "nothing to report: pass --verdicts and/or --runs")
    report_path = Path(out) / "report.md"
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text("\n".join(sections), encoding="utf-8")
    print(f"report: wrote {report_path}")
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="corpusqc", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="TOML or JSON config file")
    parser.add_argument("--out-dir", dest="out_dir", help="output directory")
    parser.add_argument("--seed", type=int, dest="seed", help="split shuffle seed")
    parser.add_argument("--jobs", type=int, dest="jobs", help="worker processes (0 = all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="extract functions from Python sources")
    p.add_argument("paths", nargs="+", help="corpus files or directories")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("curate", help="clean extracted functions into training pairs")
    p.add_argument("--functions", required=True, help="functions.jsonl from ingest")
    p.set_defaults(handler=cmd_curate)

    p = sub.add_parser("scan", help="run quality rules over curated pairs")
    p.add_argument("--pairs", required=True, help="pairs.jsonl from curate")
    p.add_argument("--rules", nargs="*", help="rule sources: 'builtin' or YAML paths")
    p.add_argument("--gate", dest="gate", help="exit 2 on findings at this severity or above")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("build-dataset", help="split pairs and emit dataset variants")
    p.add_argument("--pairs", required=True)
    p.add_argument("--verdicts", required=True)
    p.add_argument("--variant", choices=("both", "full", "cleaned"), default="both")
    p.set_defaults(handler=cmd_build_dataset)

    p = sub.add_parser("score", help="score generated code against references")
    p.add_argument("--predictions", required=True, help="JSONL with func_id and completion")
    p.add_argument("--references", required=True, help="dataset split JSONL")
    p.add_argument("--shared-from", help="corpus JSONL for the shared n-gram set")
    p.add_argument("--outcomes", help="JSONL with func_id and passed for pass rate")
    p.add_argument("--scan-predictions", action="store_true", help="also scan predictions")
    p.add_argument("--rules", nargs="*", help="rule sources when scanning predictions")
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("compare", help="paired significance tests between outcome files")
    p.add_argument("--outcomes", nargs="+", required=True, metavar="NAME=PATH")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("report", help="aggregate verdicts into report artifacts")
    p.add_argument("--verdicts", help="verdicts.jsonl to break down")
    p.add_argument("--runs", nargs="*", metavar="NAME=PATH", help="verdict runs to compare")
    p.set_defaults(handler=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    overrides = {
        name: getattr(args, name, None) for name in ("out_dir", "seed", "jobs", "gate")
    }
    try:
        cfg = load_config(args.config, overrides=overrides)
        return args.handler(args, cfg)
    except (
        ConfigError,
        PatternError,
        IoError,
        EncodingError,
        MismatchedIds,
        DuplicateId,
        KeyError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
