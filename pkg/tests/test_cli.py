"""End-to-end command-line tests driving every stage in process."""

from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

from corpusqc.cli import main
from corpusqc.jsonl import read_jsonl, write_jsonl

from conftest import make_pipeline_corpus

N_CLEAN, N_DIRTY, N_VIOLATIONS = 30, 10, 8


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in list(os.environ):
        if key.startswith("CORPUSQC_"):
            monkeypatch.delenv(key)


def run(*argv: str) -> int:
    return main(list(argv))


def run_pipeline(corpus: Path, out: Path, *global_flags: str) -> None:
    base = [*global_flags, "--out-dir", str(out)]
    assert main([*base, "ingest", str(corpus)]) == 0
    assert main([*base, "curate", "--functions", str(out / "functions.jsonl")]) == 0
    assert main([*base, "scan", "--pairs", str(out / "pairs.jsonl")]) == 0
    assert (
        main(
            [
                *base,
                "build-dataset",
                "--pairs",
                str(out / "pairs.jsonl"),
                "--verdicts",
                str(out / "verdicts.jsonl"),
            ]
        )
        == 0
    )
    assert main([*base, "report", "--verdicts", str(out / "verdicts.jsonl")]) == 0


@pytest.fixture(scope="module")
def pipeline_out(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("pipeline")
    corpus = make_pipeline_corpus(root, N_CLEAN, N_DIRTY, N_VIOLATIONS)
    out = root / "out"
    run_pipeline(corpus, out)
    return out


def test_pipeline_counts(pipeline_out):
    functions = list(read_jsonl(pipeline_out / "functions.jsonl"))
    pairs = list(read_jsonl(pipeline_out / "pairs.jsonl"))
    rejects = list(read_jsonl(pipeline_out / "rejects.jsonl"))
    verdicts = list(read_jsonl(pipeline_out / "verdicts.jsonl"))
    assert len(functions) == N_CLEAN + N_DIRTY + N_VIOLATIONS
    assert len(pairs) == N_CLEAN + N_DIRTY
    assert len(rejects) == N_VIOLATIONS
    assert len(verdicts) == len(pairs)
    statuses = [v["status"] for v in verdicts]
    assert statuses.count("clean") == N_CLEAN
    assert statuses.count("low_quality") == N_DIRTY


def test_pipeline_dataset_artifacts(pipeline_out):
    assignments = list(read_jsonl(pipeline_out / "assignments.jsonl"))
    assert len(assignments) == N_CLEAN + N_DIRTY
    full = json.loads((pipeline_out / "manifest.full.json").read_text(encoding="utf-8"))
    cleaned = json.loads((pipeline_out / "manifest.cleaned.json").read_text(encoding="utf-8"))
    assert full["counts"]["eval"] == cleaned["counts"]["eval"] == (N_CLEAN + N_DIRTY) // 10
    assert full["counts"]["train"] >= cleaned["counts"]["train"]
    for variant in ("full", "cleaned"):
        for split in ("train", "eval", "test"):
            path = pipeline_out / f"{split}.{variant}.jsonl"
            rows = list(read_jsonl(path))
            for row in rows:
                assert set(row) == {"func_id", "prompt", "completion"}
    # eval and test files are identical across variants
    for split in ("eval", "test"):
        a = (pipeline_out / f"{split}.full.jsonl").read_bytes()
        b = (pipeline_out / f"{split}.cleaned.jsonl").read_bytes()
        assert a == b


def test_pipeline_report_artifacts(pipeline_out):
    bd = json.loads((pipeline_out / "breakdown.json").read_text(encoding="utf-8"))
    assert bd["total_functions"] == N_CLEAN + N_DIRTY
    assert bd["status_counts"]["low_quality"] == N_DIRTY
    sankey = json.loads((pipeline_out / "sankey.json").read_text(encoding="utf-8"))
    assert sankey["nodes"] and sankey["links"]
    text = (pipeline_out / "report.md").read_text(encoding="utf-8")
    assert f"Functions scanned: {N_CLEAN + N_DIRTY}" in text


def test_pipeline_deterministic(tmp_path, monkeypatch):
    # Identical relative out dirs in different working directories must
    # produce byte-identical artifacts.
    contents = []
    for name in ("one", "two"):
        root = tmp_path / name
        corpus = make_pipeline_corpus(root, 12, 4, 4)
        monkeypatch.chdir(root)
        run_pipeline(Path("corpus"), Path("out"))
        out = root / "out"
        contents.append(
            {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.is_file()}
        )
        assert corpus == root / "corpus"
    assert contents[0] == contents[1]


def test_scan_gate_trips(tmp_path, pipeline_out):
    code = main(
        [
            "--out-dir",
            str(tmp_path),
            "scan",
            "--pairs",
            str(pipeline_out / "pairs.jsonl"),
            "--gate",
            "warning",
        ]
    )
    assert code == 2
    # verdicts are still written in full before the gate fires
    assert len(list(read_jsonl(tmp_path / "verdicts.jsonl"))) == N_CLEAN + N_DIRTY


def test_scan_gate_clean_passes(tmp_path, pipeline_out):
    clean_ids = {
        v["func_id"]
        for v in read_jsonl(pipeline_out / "verdicts.jsonl")
        if v["status"] == "clean"
    }
    subset = tmp_path / "clean_pairs.jsonl"
    write_jsonl(
        subset,
        (r for r in read_jsonl(pipeline_out / "pairs.jsonl") if r["func_id"] in clean_ids),
    )
    code = main(
        ["--out-dir", str(tmp_path), "scan", "--pairs", str(subset), "--gate", "info"]
    )
    assert code == 0


def test_scan_parallel_matches_sequential(tmp_path, pipeline_out):
    pairs = str(pipeline_out / "pairs.jsonl")
    for jobs, name in (("1", "seq"), ("2", "par")):
        assert main(["--out-dir", str(tmp_path / name), "--jobs", jobs, "scan", "--pairs", pairs]) == 0
    seq = (tmp_path / "seq" / "verdicts.jsonl").read_bytes()
    par = (tmp_path / "par" / "verdicts.jsonl").read_bytes()
    assert seq == par


def test_config_precedence_through_cli(tmp_path, monkeypatch, pipeline_out):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("seed = 5\n", encoding="utf-8")
    pairs = str(pipeline_out / "pairs.jsonl")
    verdicts = str(pipeline_out / "verdicts.jsonl")

    def manifest_seed(out: Path, *flags: str) -> int:
        args = [
            *flags,
            "--out-dir",
            str(out),
            "build-dataset",
            "--pairs",
            pairs,
            "--verdicts",
            verdicts,
            "--variant",
            "full",
        ]
        assert main(args) == 0
        return json.loads((out / "manifest.full.json").read_text(encoding="utf-8"))["seed"]

    assert manifest_seed(tmp_path / "a", "--config", str(cfg)) == 5
    monkeypatch.setenv("CORPUSQC_SEED", "7")
    assert manifest_seed(tmp_path / "b", "--config", str(cfg)) == 7
    assert manifest_seed(tmp_path / "c", "--config", str(cfg), "--seed", "9") == 9


def test_seed_changes_split(tmp_path, pipeline_out):
    pairs = str(pipeline_out / "pairs.jsonl")
    verdicts = str(pipeline_out / "verdicts.jsonl")
    evals = []
    for seed in ("42", "43"):
        out = tmp_path / seed
        args = [
            "--seed",
            seed,
            "--out-dir",
            str(out),
            "build-dataset",
            "--pairs",
            pairs,
            "--verdicts",
            verdicts,
            "--variant",
            "full",
        ]
        assert main(args) == 0
        evals.append({r["func_id"] for r in read_jsonl(out / "eval.full.jsonl")})
    assert evals[0] != evals[1]


def test_score_and_compare_round_trip(tmp_path, pipeline_out):
    refs = list(read_jsonl(pipeline_out / "eval.full.jsonl"))
    assert refs
    preds = tmp_path / "preds.jsonl"
    write_jsonl(preds, ({"func_id": r["func_id"], "completion": r["completion"]} for r in refs))
    outcomes = tmp_path / "outcomes.jsonl"
    write_jsonl(outcomes, ({"func_id": r["func_id"], "passed": True} for r in refs))
    out = tmp_path / "scores"
    code = main(
        [
            "--out-dir",
            str(out),
            "score",
            "--predictions",
            str(preds),
            "--references",
            str(pipeline_out / "eval.full.jsonl"),
            "--shared-from",
            str(pipeline_out / "train.full.jsonl"),
            "--outcomes",
            str(outcomes),
            "--scan-predictions",
        ]
    )
    assert code == 0
    summary = json.loads((out / "score_summary.json").read_text(encoding="utf-8"))
    assert summary["n"] == len(refs)
    assert summary["exact_match_rate"] == 1.0
    assert summary["crystal_bleu_mean"] == 1.0
    assert summary["pass_rate"] == 1.0
    rows = list(read_jsonl(out / "scores.jsonl"))
    assert all(row["exact_match"] for row in rows)

    run_a = tmp_path / "run_a.jsonl"
    run_b = tmp_path / "run_b.jsonl"
    write_jsonl(run_a, ({"func_id": r["func_id"], "value": True} for r in refs))
    write_jsonl(run_b, ({"func_id": r["func_id"], "value": False} for r in refs))
    code = main(
        [
            "--out-dir",
            str(out),
            "compare",
            "--outcomes",
            f"a={run_a}",
            f"b={run_b}",
        ]
    )
    assert code == 0
    results = json.loads((out / "comparisons.json").read_text(encoding="utf-8"))["results"]
    assert len(results) == 1
    assert results[0]["label"] == "a_vs_b"
    assert results[0]["test_name"].startswith("mcnemar")


def test_report_runs_comparison(tmp_path, pipeline_out):
    verdicts = str(pipeline_out / "verdicts.jsonl")
    out = tmp_path / "rep"
    code = main(
        ["--out-dir", str(out), "report", "--runs", f"a={verdicts}", f"b={verdicts}"]
    )
    assert code == 0
    table = json.loads((out / "comparison.json").read_text(encoding="utf-8"))
    assert [row["model_id"] for row in table["models"]] == ["a", "b"]
    assert "| model |" in (out / "report.md").read_text(encoding="utf-8")


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert "corpusqc" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],  # no subcommand
        ["frobnicate"],  # unknown subcommand
        ["scan"],  # missing required --pairs
        ["curate", "--functions"],  # flag without value
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    assert main(argv) == 1
    assert "usage error" in capsys.readouterr().err


def test_bad_config_file_exits_one(tmp_path, capsys):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("sead = 5\n", encoding="utf-8")
    assert main(["--config", str(cfg), "ingest", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_bad_gate_value_exits_one(tmp_path, capsys):
    code = main(
        ["--out-dir", str(tmp_path), "scan", "--pairs", "x.jsonl", "--gate", "fatal"]
    )
    assert code == 1
    assert "gate" in capsys.readouterr().err


def test_missing_input_exits_one(tmp_path, capsys):
    code = main(["--out-dir", str(tmp_path), "curate", "--functions", str(tmp_path / "no.jsonl")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_compare_requires_two_runs(tmp_path, capsys):
    path = tmp_path / "one.jsonl"
    write_jsonl(path, [{"func_id": "a", "value": True}])
    assert main(["--out-dir", str(tmp_path), "compare", "--outcomes", f"a={path}"]) == 1
    assert "at least two" in capsys.readouterr().err


def test_compare_rejects_mismatched_ids(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    write_jsonl(a, [{"func_id": "x", "value": True}, {"func_id": "y", "value": True}])
    write_jsonl(b, [{"func_id": "x", "value": True}, {"func_id": "z", "value": True}])
    assert main(["--out-dir", str(tmp_path), "compare", "--outcomes", f"a={a}", f"b={b}"]) == 1
    assert "do not match" in capsys.readouterr().err


def test_report_without_inputs_exits_one(tmp_path, capsys):
    assert main(["--out-dir", str(tmp_path), "report"]) == 1
    assert "nothing to report" in capsys.readouterr().err
