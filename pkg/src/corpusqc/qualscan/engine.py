"""Rule loading, matching, and function-level quality verdicts.

A rule fires when any of its candidate patterns matches and the match
survives three filters: ``not`` patterns anchored at the same site,
``require`` patterns that must match elsewhere in the function under the
candidate's bindings, and ``forbid`` patterns that must not.
"""

from __future__ import annotations

import ast
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .patterns import CompiledPattern, FunctionIndex, Matcher, PatternError, compile_pattern

CATEGORIES = frozenset(
    {
        "security",
        "correctness",
        "best-practice",
        "compatibility",
        "maintainability",
        "performance",
    }
)
SEVERITIES = frozenset({"info", "warning", "error"})

STATUS_CLEAN = "clean"
STATUS_LOW_QUALITY = "low_quality"
STATUS_SYNTAX = "syntactically_incorrect"
STATUSES = (STATUS_CLEAN, STATUS_LOW_QUALITY, STATUS_SYNTAX)


@dataclass(frozen=True)
class Rule:
    rule_id: str
    category: str
    severity: str
    message: str
    cwe: str | None = None
    any_patterns: tuple[CompiledPattern, ...] = ()
    not_patterns: tuple[CompiledPattern, ...] = ()
    require_patterns: tuple[CompiledPattern, ...] = ()
    forbid_patterns: tuple[CompiledPattern, ...] = ()


@dataclass(frozen=True)
class Finding:
    rule_id: str
    category: str
    severity: str
    message: str
    start_line: int
    end_line: int
    cwe: str | None = None


@dataclass(frozen=True)
class ScanVerdict:
    func_id: str
    status: str
    findings: tuple[Finding, ...] = ()


def _compile_entries(entries, rule_id: str) -> tuple[CompiledPattern, ...]:
    out = []
    for entry in entries or []:
        if isinstance(entry, str):
            out.append(compile_pattern(entry))
        elif isinstance(entry, dict):
            if "pattern" not in entry:
                raise PatternError(f"rule {rule_id}: pattern entry without 'pattern' key")
            out.append(
                compile_pattern(
                    entry["pattern"],
                    where=entry.get("where"),
                    contains=entry.get("contains"),
                )
            )
        else:
            raise PatternError(f"rule {rule_id}: bad pattern entry {entry!r}")
    return tuple(out)


def rule_from_spec(spec: dict) -> Rule:
    try:
        rule_id = spec["id"]
        category = spec["category"]
        severity = spec["severity"]
        message = spec["message"]
    except (KeyError, TypeError) as exc:
        raise PatternError(f"rule missing required field: {exc}") from exc
    if category not in CATEGORIES:
        raise PatternError(f"rule {rule_id}: unknown category {category!r}")
    if severity not in SEVERITIES:
        raise PatternError(f"rule {rule_id}: unknown severity {severity!r}")
    match = spec.get("match") or {}
    unknown = set(match) - {"any", "not", "require", "forbid"}
    if unknown:
        raise PatternError(f"rule {rule_id}: unknown match keys {sorted(unknown)}")
    any_patterns = _compile_entries(match.get("any"), rule_id)
    if not any_patterns:
        raise PatternError(f"rule {rule_id}: needs at least one candidate pattern")
    not_patterns = _compile_entries(match.get("not"), rule_id)
    for pattern in not_patterns:
        if not pattern.is_expression:
            raise PatternError(f"rule {rule_id}: 'not' patterns must be expressions")
    return Rule(
        rule_id=rule_id,
        category=category,
        severity=severity,
        message=message,
        cwe=spec.get("cwe"),
        any_patterns=any_patterns,
        not_patterns=not_patterns,
        require_patterns=_compile_entries(match.get("require"), rule_id),
        forbid_patterns=_compile_entries(match.get("forbid"), rule_id),
    )


def parse_ruleset(text: str) -> list[Rule]:
    """Parse rules from YAML text."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise PatternError(f"ruleset is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict) or "rules" not in doc:
        raise PatternError("ruleset must be a mapping with a 'rules' list")
    return [rule_from_spec(entry) for entry in doc["rules"]]


def load_ruleset(path: str | Path) -> list[Rule]:
    """Load rules from a YAML file."""
    return parse_ruleset(Path(path).read_text(encoding="utf-8"))


def builtin_rules() -> list[Rule]:
    text = resources.files("corpusqc.qualscan").joinpath("rules/builtin.yaml").read_text("utf-8")
    return parse_ruleset(text)


def combine_rulesets(*rulesets: Iterable[Rule]) -> list[Rule]:
    """Concatenate rulesets; a rule id seen again is dropped so each rule
    runs once."""
    seen: set[str] = set()
    out: list[Rule] = []
    for ruleset in rulesets:
        for rule in ruleset:
            if rule.rule_id in seen:
                continue
            seen.add(rule.rule_id)
            out.append(rule)
    return out


def check_syntax(code: str) -> bool:
    """True when the code parses as exactly one function definition."""
    try:
        tree = ast.parse(code)
    except (SyntaxError, ValueError):
        return False
    return len(tree.body) == 1 and isinstance(
        tree.body[0], (ast.FunctionDef, ast.AsyncFunctionDef)
    )


def match_rule(rule: Rule, index: FunctionIndex) -> list[Finding]:
    matcher = Matcher(index)
    spans: list[tuple[int, int, int, int]] = []
    for pattern in rule.any_patterns:
        for anchor, env, span in matcher.iter_matches(pattern):
            if isinstance(anchor, ast.AST) and any(
                matcher.matches_at(np, anchor) for np in rule.not_patterns
            ):
                continue
            if rule.require_patterns and not all(
                matcher.matches_anywhere(rp, env) for rp in rule.require_patterns
            ):
                continue
            if rule.forbid_patterns and any(
                matcher.matches_anywhere(fp, env) for fp in rule.forbid_patterns
            ):
                continue
            spans.append(span)
    if not spans:
        return []
    return [
        Finding(
            rule_id=rule.rule_id,
            category=rule.category,
            severity=rule.severity,
            message=rule.message,
            start_line=span[0],
            end_line=span[2],
            cwe=rule.cwe,
        )
        for span in _outermost(spans)
    ]


def _outermost(spans: list[tuple[int, int, int, int]]) -> list[tuple[int, int, int, int]]:
    """Deduplicate spans and drop spans nested inside another match."""
    unique = sorted(set(spans))
    kept: list[tuple[int, int, int, int]] = []
    for span in unique:
        contained = False
        for other in unique:
            if other == span:
                continue
            if (
                (other[0], other[1]) <= (span[0], span[1])
                and (span[2], span[3]) <= (other[2], other[3])
            ):
                contained = True
                break
        if not contained:
            kept.append(span)
    return kept


def scan_code(func_id: str, code: str, rules: Iterable[Rule]) -> ScanVerdict:
    """Scan one function's source and classify it.

    ``syntactically_incorrect`` verdicts carry no findings; rules only run
    on parseable single-function sources.
    """
    if not check_syntax(code):
        return ScanVerdict(func_id=func_id, status=STATUS_SYNTAX)
    tree = ast.parse(code)
    index = FunctionIndex(tree, code)
    findings: list[Finding] = []
    for rule in rules:
        findings.extend(match_rule(rule, index))
    findings.sort(key=lambda f: (f.start_line, f.end_line, f.rule_id))
    status = STATUS_LOW_QUALITY if findings else STATUS_CLEAN
    return ScanVerdict(func_id=func_id, status=status, findings=tuple(findings))


def scan_pair(pair, rules: Iterable[Rule]) -> ScanVerdict:
    return scan_code(pair.func_id, pair.code, rules)


def scan(pairs, rules: Iterable[Rule]) -> Iterator[ScanVerdict]:
    """Scan a stream of curated pairs."""
    rules = list(rules)
    for pair in pairs:
        yield scan_pair(pair, rules)


def verdict_status(verdict) -> str:
    """Status of a verdict-like value (ScanVerdict, mapping, or string)."""
    if isinstance(verdict, ScanVerdict):
        return verdict.status
    if isinstance(verdict, dict):
        return verdict["status"]
    return str(verdict)


def finding_to_record(finding: Finding) -> dict:
    record = {
        "rule_id": finding.rule_id,
        "category": finding.category,
        "severity": finding.severity,
        "message": finding.message,
        "start_line": finding.start_line,
        "end_line": finding.end_line,
    }
    if finding.cwe:
        record["cwe"] = finding.cwe
    return record


def finding_from_record(record: dict) -> Finding:
    return Finding(
        rule_id=record["rule_id"],
        category=record["category"],
        severity=record["severity"],
        message=record.get("message", ""),
        start_line=record.get("start_line", 0),
        end_line=record.get("end_line", 0),
        cwe=record.get("cwe"),
    )


def verdict_to_record(verdict: ScanVerdict) -> dict:
    return {
        "func_id": verdict.func_id,
        "status": verdict.status,
        "findings": [finding_to_record(f) for f in verdict.findings],
    }


def verdict_from_record(record: dict) -> ScanVerdict:
    return ScanVerdict(
        func_id=record["func_id"],
        status=record["status"],
        findings=tuple(finding_from_record(f) for f in record.get("findings", [])),
    )


__all__ = [
    "CATEGORIES",
    "Finding",
    "Rule",
    "STATUSES",
    "STATUS_CLEAN",
    "STATUS_LOW_QUALITY",
    "STATUS_SYNTAX",
    "ScanVerdict",
    "SEVERITIES",
    "builtin_rules",
    "check_syntax",
    "combine_rulesets",
    "finding_from_record",
    "finding_to_record",
    "load_ruleset",
    "match_rule",
    "parse_ruleset",
    "rule_from_spec",
    "scan",
    "scan_code",
    "scan_pair",
    "verdict_from_record",
    "verdict_status",
    "verdict_to_record",
]
