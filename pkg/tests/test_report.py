"""Aggregation and report-artifact tests, including a percentage replay
at the scale the scanner is meant to summarize."""

from __future__ import annotations

import json

import pytest

from corpusqc.qualscan import Finding, ScanVerdict
from corpusqc.report import (
    MismatchedIds,
    UnsupportedFormat,
    breakdown,
    comparison_table,
    render,
    render_markdown,
    sankey_data,
)

RULE_META = {
    "arbitrary-sleep": ("best-practice", "warning"),
    "insecure-hash": ("security", "warning"),
    "eval-injection": ("security", "error"),
    "identical-if-else-branches": ("maintainability", "info"),
}


def verdict_record(func_id, rule_ids=(), status=None) -> dict:
    findings = []
    for rule_id in rule_ids:
        category, severity = RULE_META[rule_id]
        findings.append(
            {
                "rule_id": rule_id,
                "category": category,
                "severity": severity,
                "message": "m",
                "start_line": 2,
                "end_line": 2,
                "cwe": None,
            }
        )
    if status is None:
        status = "low_quality" if findings else "clean"
    return {"func_id": func_id, "status": status, "findings": findings}


def sample_verdicts() -> list[dict]:
    rows = [verdict_record(f"c{i}") for i in range(5)]
    rows.append(verdict_record("x0", ["arbitrary-sleep"]))
    rows.append(verdict_record("x1", ["arbitrary-sleep", "insecure-hash"]))
    rows.append(verdict_record("x2", ["eval-injection", "identical-if-else-branches"]))
    rows.append(verdict_record("b0", status="syntactically_incorrect"))
    return rows


def test_breakdown_counts():
    bd = breakdown(sample_verdicts())
    assert bd.total_functions == 9
    assert bd.status_counts == {"clean": 5, "low_quality": 3, "syntactically_incorrect": 1}
    assert bd.total_findings == 5
    assert bd.low_quality_count == 3
    assert bd.issue_density == pytest.approx(5 / 3)
    assert bd.category_counts == {"best-practice": 2, "security": 2, "maintainability": 1}
    assert bd.severity_counts == {"warning": 3, "error": 1, "info": 1}
    assert bd.rule_counts["arbitrary-sleep"] == 2


def test_breakdown_accepts_scanverdict_objects():
    finding = Finding(
        rule_id="arbitrary-sleep",
        category="best-practice",
        severity="warning",
        message="m",
        start_line=1,
        end_line=1,
    )
    verdicts = [
        ScanVerdict(func_id="a", status="low_quality", findings=(finding,)),
        ScanVerdict(func_id="b", status="clean", findings=()),
    ]
    bd = breakdown(verdicts)
    assert bd.total_functions == 2
    assert bd.total_findings == 1
    assert bd.issue_density == 1.0


def test_shares_sum_to_one():
    bd = breakdown(sample_verdicts())
    assert sum(bd.category_shares.values()) == pytest.approx(1.0, abs=1e-9)
    assert sum(bd.severity_shares.values()) == pytest.approx(1.0, abs=1e-9)


def test_empty_breakdown():
    bd = breakdown([])
    assert bd.total_functions == 0
    assert bd.issue_density == 0.0
    assert bd.category_shares == {}
    assert bd.to_record()["total_findings"] == 0


def test_top_rules_ranking():
    rows = [verdict_record(f"f{i}", ["arbitrary-sleep"]) for i in range(3)]
    rows += [verdict_record(f"g{i}", ["insecure-hash"]) for i in range(3)]
    bd = breakdown(rows)
    assert bd.top_rules("best-practice") == [("arbitrary-sleep", 3)]
    assert bd.top_rules("security", top_k=1) == [("insecure-hash", 3)]
    assert bd.top_rules("missing-category") == []


def test_sankey_conservation():
    bd = breakdown(sample_verdicts())
    data = sankey_data(bd)
    nodes = {n["id"]: n for n in data["nodes"]}
    inflow: dict[int, int] = {}
    outflow: dict[int, int] = {}
    for link in data["links"]:
        outflow[link["source"]] = outflow.get(link["source"], 0) + link["value"]
        inflow[link["target"]] = inflow.get(link["target"], 0) + link["value"]
    for node_id, node in nodes.items():
        if node["layer"] == "rule":
            assert inflow.get(node_id, 0) == outflow.get(node_id, 0)
    category_out = sum(
        link["value"] for link in data["links"] if nodes[link["source"]]["layer"] == "category"
    )
    severity_in = sum(
        link["value"] for link in data["links"] if nodes[link["target"]]["layer"] == "severity"
    )
    assert category_out == severity_in == bd.total_findings


def run_of(n: int, low_quality: int, prefix: str = "f"):
    """A verdict stream with the given size and low-quality count."""
    for i in range(n):
        if i < low_quality:
            yield verdict_record(f"{prefix}{i}", ["arbitrary-sleep"])
        else:
            yield verdict_record(f"{prefix}{i}")


def test_comparison_table_percentage_replay():
    # Three same-id runs over 551,641 functions whose low-quality rates
    # print as 7.09%, 5.85%, and 2.16% at two decimals.
    n = 551_641
    counts = {"base": 39_111, "full": 32_271, "cleaned": 11_915}
    table = comparison_table({name: run_of(n, c) for name, c in counts.items()})
    record = table.to_record()
    pcts = {row["model_id"]: round(row["pct_low_quality"], 2) for row in record["models"]}
    assert pcts == {"base": 7.09, "full": 5.85, "cleaned": 2.16}
    for row in record["models"]:
        assert row["n"] == n


def test_comparison_table_rejects_mismatched_ids():
    runs = {
        "a": [verdict_record("x"), verdict_record("y")],
        "b": [verdict_record("x"), verdict_record("z")],
    }
    with pytest.raises(MismatchedIds):
        comparison_table(runs)


def test_render_markdown_breakdown():
    text = render_markdown(breakdown(sample_verdicts()))
    assert "Functions scanned: 9" in text
    assert "Issue density" in text
    assert "| severity |" in text
    assert "arbitrary-sleep" in text


def test_render_markdown_comparison():
    table = comparison_table({"a": list(run_of(100, 9)), "b": list(run_of(100, 2))})
    text = render_markdown(table)
    assert "| model |" in text
    assert "9.00%" in text and "2.00%" in text


def test_render_json_and_unsupported():
    bd = breakdown(sample_verdicts())
    parsed = json.loads(render(bd, "json"))
    assert parsed["total_functions"] == 9
    assert render(bd, "markdown") == render_markdown(bd)
    with pytest.raises(UnsupportedFormat):
        render(bd, "xml")
