"""Aggregation of scan verdicts into report artifacts.

Breakdowns count findings by category, severity, and rule; shares are
fractions of total findings so they always sum to one. The Sankey data keeps
flow conservation by building category-to-rule and rule-to-severity links
from the same finding counts.
"""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .qualscan import ScanVerdict, STATUS_CLEAN, STATUS_LOW_QUALITY, STATUS_SYNTAX


class MismatchedIds(ValueError):
    """Verdict runs do not cover the same set of functions."""


class UnsupportedFormat(ValueError):
    """Requested rendering format is not available."""


def _verdict_parts(verdict) -> tuple[str, str, Iterable]:
    """(func_id, status, findings) from a ScanVerdict or a JSONL record."""
    if isinstance(verdict, ScanVerdict):
        return verdict.func_id, verdict.status, verdict.findings
    return verdict["func_id"], verdict["status"], verdict.get("findings", ())


def _finding_parts(finding) -> tuple[str, str, str]:
    """(rule_id, category, severity) from a Finding or a JSONL record."""
    if isinstance(finding, Mapping):
        return finding["rule_id"], finding["category"], finding["severity"]
    return finding.rule_id, finding.category, finding.severity


@dataclass
class IssueBreakdown:
    total_functions: int = 0
    status_counts: dict[str, int] = field(default_factory=dict)
    total_findings: int = 0
    category_counts: dict[str, int] = field(default_factory=dict)
    severity_counts: dict[str, int] = field(default_factory=dict)
    rule_counts: dict[str, int] = field(default_factory=dict)
    category_rule_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    rule_severity_counts: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def low_quality_count(self) -> int:
        return self.status_counts.get(STATUS_LOW_QUALITY, 0)

    @property
    def syntactically_incorrect_count(self) -> int:
        return self.status_counts.get(STATUS_SYNTAX, 0)

    @property
    def clean_count(self) -> int:
        return self.status_counts.get(STATUS_CLEAN, 0)

    @property
    def issue_density(self) -> float:
        """Findings per low-quality function."""
        if self.low_quality_count == 0:
            return 0.0
        return self.total_findings / self.low_quality_count

    @property
    def category_shares(self) -> dict[str, float]:
        if self.total_findings == 0:
            return {}
        return {k: v / self.total_findings for k, v in sorted(self.category_counts.items())}

    @property
    def severity_shares(self) -> dict[str, float]:
        if self.total_findings == 0:
            return {}
        return {k: v / self.total_findings for k, v in sorted(self.severity_counts.items())}

    def top_rules(self, category: str, top_k: int = 5) -> list[tuple[str, int]]:
        counts = self.category_rule_counts.get(category, {})
        ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
        return ranked[:top_k]

    def to_record(self, top_k: int = 5) -> dict:
        return {
            "total_functions": self.total_functions,
            "status_counts": dict(sorted(self.status_counts.items())),
            "total_findings": self.total_findings,
            "issue_density": self.issue_density,
            "category_counts": dict(sorted(self.category_counts.items())),
            "category_shares": self.category_shares,
            "severity_counts": dict(sorted(self.severity_counts.items())),
            "severity_shares": self.severity_shares,
            "top_rules_per_category": {
                category: [{"rule_id": rule, "count": count} for rule, count in self.top_rules(category, top_k)]
                for category in sorted(self.category_rule_counts)
            },
        }


def breakdown(verdicts: Iterable) -> IssueBreakdown:
    """Single-pass aggregation of a verdict stream."""
    out = IssueBreakdown()
    statuses: Counter[str] = Counter()
    categories: Counter[str] = Counter()
    severities: Counter[str] = Counter()
    rules: Counter[str] = Counter()
    cat_rule: dict[str, Counter] = {}
    rule_sev: dict[str, Counter] = {}
    total_findings = 0
    total = 0
    for verdict in verdicts:
        _, status, findings = _verdict_parts(verdict)
        total += 1
        statuses[status] += 1
        for finding in findings:
            rule_id, category, severity = _finding_parts(finding)
            total_findings += 1
            categories[category] += 1
            severities[severity] += 1
            rules[rule_id] += 1
            cat_rule.setdefault(category, Counter())[rule_id] += 1
            rule_sev.setdefault(rule_id, Counter())[severity] += 1
    out.total_functions = total
    out.status_counts = dict(statuses)
    out.total_findings = total_findings
    out.category_counts = dict(categories)
    out.severity_counts = dict(severities)
    out.rule_counts = dict(rules)
    out.category_rule_counts = {k: dict(v) for k, v in cat_rule.items()}
    out.rule_severity_counts = {k: dict(v) for k, v in rule_sev.items()}
    return out


@dataclass(frozen=True)
class ModelRow:
    model_id: str
    breakdown: IssueBreakdown

    def to_record(self) -> dict:
        n = self.breakdown.total_functions
        return {
            "model_id": self.model_id,
            "n": n,
            "low_quality_count": self.breakdown.low_quality_count,
            "syntactically_incorrect_count": self.breakdown.syntactically_incorrect_count,
            "clean_count": self.breakdown.clean_count,
            "pct_low_quality": 100.0 * self.breakdown.low_quality_count / n if n else 0.0,
            "pct_syntactically_incorrect": (
                100.0 * self.breakdown.syntactically_incorrect_count / n if n else 0.0
            ),
            "total_findings": self.breakdown.total_findings,
        }


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ModelRow, ...]

    def to_record(self) -> dict:
        return {"models": [row.to_record() for row in self.rows]}


def comparison_table(runs: Mapping[str, Iterable]) -> ComparisonTable:
    """Side-by-side verdict breakdowns for multiple scanned models.

    Every run must cover exactly the same function ids; anything else is a
    :class:`MismatchedIds` error.
    """
    rows: list[ModelRow] = []
    id_sets: dict[str, frozenset] = {}
    for model_id, verdicts in runs.items():
        ids = set()
        collected = []
        for verdict in verdicts:
            func_id, _, _ = _verdict_parts(verdict)
            ids.add(func_id)
            collected.append(verdict)
        id_sets[model_id] = frozenset(ids)
        rows.append(ModelRow(model_id=model_id, breakdown=breakdown(collected)))
    names = list(id_sets)
    for name in names[1:]:
        if id_sets[name] != id_sets[names[0]]:
            missing = len(id_sets[names[0]] ^ id_sets[name])
            raise MismatchedIds(
                f"runs {names[0]!r} and {name!r} differ on {missing} function ids"
            )
    return ComparisonTable(rows=tuple(rows))


def sankey_data(bd: IssueBreakdown) -> dict:
    """Category -> rule -> severity flow built from one finding count set,
    so inflow equals outflow at every rule node."""
    nodes: list[dict] = []
    index: dict[tuple[str, str], int] = {}

    def node(layer: str, label: str) -> int:
        key = (layer, label)
        if key not in index:
            index[key] = len(nodes)
            nodes.append({"id": index[key], "layer": layer, "label": label})
        return index[key]

    links: list[dict] = []
    for category in sorted(bd.category_rule_counts):
        for rule_id, count in sorted(bd.category_rule_counts[category].items()):
            links.append(
                {"source": node("category", category), "target": node("rule", rule_id), "value": count}
            )
    for rule_id in sorted(bd.rule_severity_counts):
        for severity, count in sorted(bd.rule_severity_counts[rule_id].items()):
            links.append(
                {"source": node("rule", rule_id), "target": node("severity", severity), "value": count}
            )
    return {"nodes": nodes, "links": links}


def _pct(value: float) -> str:
    return f"{100.0 * value:.2f}%"


def render_markdown(obj: IssueBreakdown | ComparisonTable, top_k: int = 5) -> str:
    if isinstance(obj, IssueBreakdown):
        lines = ["# Scan breakdown", ""]
        lines.append(f"Functions scanned: {obj.total_functions}")
        lines.append(f"- clean: {obj.clean_count}")
        lines.append(f"- low quality: {obj.low_quality_count}")
        lines.append(f"- syntactically incorrect: {obj.syntactically_incorrect_count}")
        lines.append("")
        lines.append(f"Total findings: {obj.total_findings}")
        lines.append(f"Issue density (findings per low-quality function): {obj.issue_density:.3f}")
        lines.append("")
        lines.append("| severity | findings | share |")
        lines.append("| --- | ---: | ---: |")
        for severity, count in sorted(obj.severity_counts.items()):
            lines.append(f"| {severity} | {count} | {_pct(count / obj.total_findings) if obj.total_findings else '0.00%'} |")
        lines.append("")
        lines.append("| category | findings | share |")
        lines.append("| --- | ---: | ---: |")
        for category, count in sorted(obj.category_counts.items()):
            lines.append(f"| {category} | {count} | {_pct(count / obj.total_findings) if obj.total_findings else '0.00%'} |")
        lines.append("")
        for category in sorted(obj.category_rule_counts):
            lines.append(f"Top rules in {category}:")
            for rule_id, count in obj.top_rules(category, top_k):
                lines.append(f"- {rule_id}: {count}")
            lines.append("")
        return "\n".join(lines).rstrip() + "\n"
    if isinstance(obj, ComparisonTable):
        lines = ["# Model comparison", ""]
        lines.append("| model | n | % syntactically incorrect | % low quality | findings |")
        lines.append("| --- | ---: | ---: | ---: | ---: |")
        for row in obj.rows:
            record = row.to_record()
            lines.append(
                "| {model_id} | {n} | {si:.2f}% | {lq:.2f}% | {tf} |".format(
                    model_id=record["model_id"],
                    n=record["n"],
                    si=record["pct_syntactically_incorrect"],
                    lq=record["pct_low_quality"],
                    tf=record["total_findings"],
                )
            )
        return "\n".join(lines) + "\n"
    raise UnsupportedFormat(f"cannot render {type(obj).__name__}")


def render(obj: IssueBreakdown | ComparisonTable, fmt: str = "markdown") -> str:
    if fmt == "markdown":
        return render_markdown(obj)
    if fmt == "json":
        return json.dumps(obj.to_record(), sort_keys=True, indent=2) + "\n"
    raise UnsupportedFormat(f"unknown format {fmt!r}")


__all__ = [
    "ComparisonTable",
    "IssueBreakdown",
    "MismatchedIds",
    "ModelRow",
    "UnsupportedFormat",
    "breakdown",
    "comparison_table",
    "render",
    "render_markdown",
    "sankey_data",
]
