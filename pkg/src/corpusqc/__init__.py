"""Corpus curation, quality scanning, and statistical comparison toolkit.

The pipeline turns raw Python sources into prompt/completion training
pairs, scans them with a structural rule engine, builds reproducible
dataset splits (a full variant and a cleaned variant that drops flagged
training functions), scores generated code, and compares model runs with
paired statistics.
"""

__version__ = "0.1.0"

from .config import ENV_PREFIX, ConfigError, PipelineConfig, load_config
from .curate import CurationConfig, CuratedPair, RejectRecord, clean_code, clean_description, curate, curate_lists, length_gate
from .dataset import (
    DatasetManifest,
    MissingVerdict,
    SplitAssignment,
    emit,
    make_variants,
    mark_cleaned,
    prompt_text,
    split,
    split_sizes,
)
from .formatter import canonical_format, is_canonical
from .ingest import (
    EncodingError,
    ExtractResult,
    FileReject,
    IoError,
    RawFunction,
    SourceFile,
    discover_files,
    extract_file,
    extract_functions,
    iter_corpus,
    require_docstring,
)
from .metrics import (
    DuplicateId,
    ScoreRow,
    crystal_bleu,
    exact_match,
    metric_tokens,
    pass_rate,
    score_generations,
    summarize_scores,
    trivially_shared_ngrams,
)
from .qualscan import (
    Finding,
    PatternError,
    Rule,
    ScanVerdict,
    builtin_rules,
    check_syntax,
    combine_rulesets,
    compile_pattern,
    load_ruleset,
    parse_ruleset,
    scan,
    scan_code,
)
from .report import (
    ComparisonTable,
    IssueBreakdown,
    MismatchedIds,
    UnsupportedFormat,
    breakdown,
    comparison_table,
    render,
    render_markdown,
    sankey_data,
)
from .stats import (
    DegenerateTest,
    TestResult,
    anderson_darling_normality,
    benjamini_hochberg,
    cliffs_delta,
    compare_models,
    confusion_counts,
    mcnemar,
    wilcoxon_signed_rank,
)

__all__ = [
    "__version__",
    "ENV_PREFIX",
    "ConfigError",
    "PipelineConfig",
    "load_config",
    "CurationConfig",
    "CuratedPair",
    "RejectRecord",
    "clean_code",
    "clean_description",
    "curate",
    "curate_lists",
    "length_gate",
    "DatasetManifest",
    "MissingVerdict",
    "SplitAssignment",
    "emit",
    "make_variants",
    "mark_cleaned",
    "prompt_text",
    "split",
    "split_sizes",
    "canonical_format",
    "is_canonical",
    "EncodingError",
    "ExtractResult",
    "FileReject",
    "IoError",
    "RawFunction",
    "SourceFile",
    "discover_files",
    "extract_file",
    "extract_functions",
    "iter_corpus",
    "require_docstring",
    "DuplicateId",
    "ScoreRow",
    "crystal_bleu",
    "exact_match",
    "metric_tokens",
    "pass_rate",
    "score_generations",
    "summarize_scores",
    "trivially_shared_ngrams",
    "Finding",
    "PatternError",
    "Rule",
    "ScanVerdict",
    "builtin_rules",
    "check_syntax",
    "combine_rulesets",
    "compile_pattern",
    "load_ruleset",
    "parse_ruleset",
    "scan",
    "scan_code",
    "ComparisonTable",
    "IssueBreakdown",
    "MismatchedIds",
    "UnsupportedFormat",
    "breakdown",
    "comparison_table",
    "render",
    "render_markdown",
    "sankey_data",
    "DegenerateTest",
    "TestResult",
    "anderson_darling_normality",
    "benjamini_hochberg",
    "cliffs_delta",
    "compare_models",
    "confusion_counts",
    "mcnemar",
    "wilcoxon_signed_rank",
]
