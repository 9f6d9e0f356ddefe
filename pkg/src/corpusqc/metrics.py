"""Similarity and correctness metrics for generated code.

CrystalBLEU is BLEU computed after deleting the corpus's trivially shared
n-grams (the k most frequent ones), which removes the score inflation that
boilerplate tokens cause on code. Exact match compares canonically formatted
sources, so formatting differences never count against a prediction.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .formatter import canonical_format
from .qualscan import Rule, ScanVerdict, scan_code, verdict_to_record
from .tokens import robust_code_tokens


class DuplicateId(ValueError):
    """The same func_id appears twice in a result set."""


def _normalize(text: str) -> str:
    return "\n".join(line.rstrip() for line in text.rstrip().splitlines())


def exact_match(prediction: str, target: str, formatter=canonical_format) -> bool:
    """Token-for-token equality after canonical formatting.

    Unformattable input (a prediction that does not parse) falls back to
    comparing whitespace-normalized raw text.
    """
    try:
        pred = formatter(prediction)
        tgt = formatter(target)
    except (SyntaxError, ValueError):
        pred, tgt = prediction, target
    return _normalize(pred) == _normalize(tgt)


def metric_tokens(code: str, formatter=canonical_format) -> list[str]:
    """Lexical tokens of canonically formatted code; raw-text tokens when the
    code does not parse."""
    try:
        code = formatter(code)
    except (SyntaxError, ValueError):
        pass
    return robust_code_tokens(code)


def _ngrams(tokens: Sequence[str], n: int) -> Iterable[tuple[str, ...]]:
    return (tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def trivially_shared_ngrams(
    corpus: Iterable[Sequence[str]],
    k: int = 500,
    max_n: int = 4,
) -> frozenset[tuple[str, ...]]:
    """The k most frequent n-grams (1..max_n) across a token-sequence corpus.

    Ties at the cutoff break by lexicographic n-gram order so the set is
    deterministic. k=0 disables deletion and reduces CrystalBLEU to BLEU.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return frozenset()
    counts: Counter[tuple[str, ...]] = Counter()
    for tokens in corpus:
        tokens = list(tokens)
        for n in range(1, max_n + 1):
            counts.update(_ngrams(tokens, n))
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return frozenset(gram for gram, _ in ranked[:k])


def crystal_bleu(
    prediction: Sequence[str],
    target: Sequence[str],
    shared: frozenset[tuple[str, ...]] = frozenset(),
    max_n: int = 4,
    epsilon: float = 1e-9,
) -> float:
    """BLEU over token sequences with shared n-grams deleted.

    Precision at each order ignores n-grams in ``shared``; orders with no
    remaining prediction n-grams are skipped. Zero precisions smooth to
    ``epsilon``. The brevity penalty uses post-deletion unigram lengths. If
    deletion empties both sequences the score is 1.0; if it empties exactly
    one, 0.0.
    """
    prediction = list(prediction)
    target = list(target)
    len_pred = sum(1 for tok in prediction if (tok,) not in shared)
    len_tgt = sum(1 for tok in target if (tok,) not in shared)
    if len_pred == 0 and len_tgt == 0:
        return 1.0
    if len_pred == 0 or len_tgt == 0:
        return 0.0

    log_sum = 0.0
    orders = 0
    for n in range(1, max_n + 1):
        pred_counts = Counter(g for g in _ngrams(prediction, n) if g not in shared)
        total = sum(pred_counts.values())
        if total == 0:
            continue
        tgt_counts = Counter(g for g in _ngrams(target, n) if g not in shared)
        clipped = sum(min(count, tgt_counts[gram]) for gram, count in pred_counts.items())
        precision = clipped / total if clipped else epsilon
        log_sum += math.log(precision)
        orders += 1
    if orders == 0:
        return 0.0
    geo_mean = math.exp(log_sum / orders)
    brevity = min(1.0, math.exp(1.0 - len_tgt / len_pred))
    return brevity * geo_mean


def pass_rate(outcomes: Mapping[object, bool] | Iterable[tuple[object, bool]]) -> float:
    """Fraction of functions whose executions passed, one vote per func_id."""
    if isinstance(outcomes, Mapping):
        items = outcomes.items()
    else:
        items = list(outcomes)
    seen: set[object] = set()
    passed = 0
    total = 0
    for func_id, ok in items:
        if func_id in seen:
            raise DuplicateId(f"duplicate outcome for {func_id!r}")
        seen.add(func_id)
        total += 1
        passed += bool(ok)
    if total == 0:
        raise ValueError("no outcomes to aggregate")
    return passed / total


@dataclass(frozen=True)
class ScoreRow:
    func_id: object
    exact_match: bool
    crystal_bleu: float
    verdict: ScanVerdict | None = None

    def to_record(self) -> dict:
        record = {
            "func_id": self.func_id,
            "exact_match": self.exact_match,
            "crystal_bleu": self.crystal_bleu,
        }
        if self.verdict is not None:
            record["verdict"] = verdict_to_record(self.verdict)
        return record


def score_generations(
    predictions: Mapping[object, str] | Iterable[tuple[object, str]],
    references: Mapping[object, str],
    shared: frozenset[tuple[str, ...]] = frozenset(),
    max_n: int = 4,
    epsilon: float = 1e-9,
    rules: Sequence[Rule] | None = None,
    formatter=canonical_format,
) -> list[ScoreRow]:
    """Score each prediction against its reference by func_id.

    An exact match scores CrystalBLEU 1.0 by definition. With ``rules`` the
    prediction is also scanned and the verdict attached.
    """
    if isinstance(predictions, Mapping):
        items = predictions.items()
    else:
        items = list(predictions)
    rows: list[ScoreRow] = []
    seen: set[object] = set()
    for func_id, prediction in items:
        if func_id in seen:
            raise DuplicateId(f"duplicate prediction for {func_id!r}")
        seen.add(func_id)
        if func_id not in references:
            raise ValueError(f"prediction {func_id!r} has no matching reference")
        reference = references[func_id]
        em = exact_match(prediction, reference, formatter=formatter)
        if em:
            crystal = 1.0
        else:
            crystal = crystal_bleu(
                metric_tokens(prediction, formatter),
                metric_tokens(reference, formatter),
                shared=shared,
                max_n=max_n,
                epsilon=epsilon,
            )
        verdict = scan_code(func_id, prediction, rules) if rules is not None else None
        rows.append(ScoreRow(func_id=func_id, exact_match=em, crystal_bleu=crystal, verdict=verdict))
    return rows


def summarize_scores(rows: Sequence[ScoreRow]) -> dict:
    """Aggregate score rows into rates and distribution statistics."""
    if not rows:
        raise ValueError("no rows to summarize")
    import numpy as np

    values = np.array([row.crystal_bleu for row in rows], dtype=float)
    summary = {
        "n": len(rows),
        "exact_match_rate": sum(row.exact_match for row in rows) / len(rows),
        "crystal_bleu_mean": float(values.mean()),
        "crystal_bleu_median": float(np.median(values)),
        "crystal_bleu_sd": float(values.std(ddof=1)) if len(rows) > 1 else 0.0,
    }
    if rows[0].verdict is not None:
        statuses = Counter(row.verdict.status for row in rows if row.verdict is not None)
        summary["verdict_counts"] = dict(sorted(statuses.items()))
    return summary


__all__ = [
    "DuplicateId",
    "ScoreRow",
    "crystal_bleu",
    "exact_match",
    "metric_tokens",
    "pass_rate",
    "score_generations",
    "summarize_scores",
    "trivially_shared_ngrams",
]
