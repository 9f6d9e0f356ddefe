"""Syntax-tree pattern rules and function-level quality scanning."""

from .engine import (
    CATEGORIES,
    Finding,
    Rule,
    STATUSES,
    STATUS_CLEAN,
    STATUS_LOW_QUALITY,
    STATUS_SYNTAX,
    ScanVerdict,
    SEVERITIES,
    builtin_rules,
    check_syntax,
    combine_rulesets,
    finding_from_record,
    finding_to_record,
    load_ruleset,
    match_rule,
    parse_ruleset,
    rule_from_spec,
    scan,
    scan_code,
    scan_pair,
    verdict_from_record,
    verdict_status,
    verdict_to_record,
)
from .patterns import CompiledPattern, FunctionIndex, Matcher, PatternError, compile_pattern

__all__ = [
    "CATEGORIES",
    "CompiledPattern",
    "Finding",
    "FunctionIndex",
    "Matcher",
    "PatternError",
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
    "compile_pattern",
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
