"""Similarity-metric tests against a freshly written BLEU oracle."""

from __future__ import annotations

import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpusqc.metrics import (
    DuplicateId,
    crystal_bleu,
    exact_match,
    metric_tokens,
    pass_rate,
    score_generations,
    summarize_scores,
    trivially_shared_ngrams,
)
from corpusqc.qualscan import builtin_rules


def bleu_oracle(pred: list[str], tgt: list[str], max_n: int = 4, eps: float = 1e-9) -> float:
    """Smoothed BLEU written straight from the definition, kept independent
    of the implementation under test."""
    if not pred and not tgt:
        return 1.0
    if not pred or not tgt:
        return 0.0
    logs = []
    for n in range(1, max_n + 1):
        pred_grams = [tuple(pred[i : i + n]) for i in range(len(pred) - n + 1)]
        if not pred_grams:
            continue
        tgt_grams = Counter(tuple(tgt[i : i + n]) for i in range(len(tgt) - n + 1))
        clipped = 0
        for gram, count in Counter(pred_grams).items():
            clipped += min(count, tgt_grams.get(gram, 0))
        precision = clipped / len(pred_grams) if clipped else eps
        logs.append(math.log(precision))
    if not logs:
        return 0.0
    brevity = min(1.0, math.exp(1.0 - len(tgt) / len(pred)))
    return brevity * math.exp(sum(logs) / len(logs))


def test_hand_case_root_half():
    score = crystal_bleu("a b c d".split(), "a b c e".split(), frozenset(), max_n=2)
    assert abs(score - math.sqrt(0.5)) < 1e-9


def test_identity_is_one():
    tokens = "def f ( x ) : return x + 1".split()
    assert crystal_bleu(tokens, tokens) == pytest.approx(1.0, abs=1e-12)


def test_empty_cases():
    assert crystal_bleu([], []) == 1.0
    assert crystal_bleu(["a"], []) == 0.0
    assert crystal_bleu([], ["a"]) == 0.0


def test_k_zero_equals_bleu_oracle_on_random_pairs():
    rng = random.Random(42)
    vocab = [f"tok{i}" for i in range(30)]
    for _ in range(100):
        pred = [rng.choice(vocab) for _ in range(rng.randint(1, 40))]
        tgt = [rng.choice(vocab) for _ in range(rng.randint(1, 40))]
        mine = crystal_bleu(pred, tgt, frozenset())
        oracle = bleu_oracle(pred, tgt)
        assert abs(mine - oracle) < 1e-9, (pred, tgt)


def test_shared_deletion_changes_score():
    pred = "a b c d".split()
    tgt = "a b c e".split()
    # deleting the unigram "a" and the bigram ("a","b") removes one hit at
    # each order: p1 = 2/3, p2 = 1/2
    shared = frozenset({("a",), ("a", "b")})
    score = crystal_bleu(pred, tgt, shared, max_n=2)
    assert score == pytest.approx(math.sqrt((2 / 3) * (1 / 2)), abs=1e-12)


def test_brevity_penalty_uses_post_deletion_lengths():
    pred = "x a".split()
    tgt = "x a b c".split()
    # without deletion: |p|=2, |t|=4 -> BP = e^(1-2)
    base = crystal_bleu(pred, tgt, frozenset(), max_n=1)
    assert base == pytest.approx(math.exp(-1.0) * 1.0, abs=1e-12)
    # deleting "x" leaves |p|=1, |t|=3 -> BP = e^(1-3) with p1 = 1
    shared = frozenset({("x",)})
    trimmed = crystal_bleu(pred, tgt, shared, max_n=1)
    assert trimmed == pytest.approx(math.exp(-2.0), abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.sampled_from("abcdefg"), max_size=20),
    st.lists(st.sampled_from("abcdefg"), max_size=20),
)
def test_score_always_in_unit_interval(pred, tgt):
    score = crystal_bleu(pred, tgt)
    assert 0.0 <= score <= 1.0


def test_trivially_shared_top_k_matches_brute_force():
    rng = random.Random(7)
    corpus = [[rng.choice("abcde") for _ in range(rng.randint(1, 30))] for _ in range(50)]
    counts = Counter()
    for tokens in corpus:
        for n in range(1, 5):
            for i in range(len(tokens) - n + 1):
                counts[tuple(tokens[i : i + n])] += 1
    k = 25
    expected = set(g for g, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k])
    assert trivially_shared_ngrams(corpus, k=k) == expected


def test_trivially_shared_deterministic_under_ties():
    corpus = [["b", "a"], ["a", "b"]]  # every unigram and bigram count ties
    first = trivially_shared_ngrams(corpus, k=2)
    second = trivially_shared_ngrams(list(reversed(corpus)), k=2)
    assert first == second == {("a",), ("b",)}


def test_trivially_shared_k_zero_and_negative():
    assert trivially_shared_ngrams([["a"]], k=0) == frozenset()
    with pytest.raises(ValueError):
        trivially_shared_ngrams([["a"]], k=-1)


# -- exact match ----------------------------------------------------------------

def test_exact_match_is_format_invariant():
    a = "def f(x):\n    return 'v'\n"
    b = 'def f( x ):\n        return "v"\n'
    assert exact_match(a, b)


def test_exact_match_negative():
    assert not exact_match("def f(x):\n    return 1\n", "def f(x):\n    return 2\n")


def test_exact_match_raw_fallback_for_unparsable():
    assert exact_match("not valid (", "not valid (")
    assert not exact_match("not valid (", "also not valid )")


def test_metric_tokens_normalize_formatting():
    assert metric_tokens("def f(x):  return ( x )\n") == metric_tokens("def f(x):\n    return x\n")


# -- pass rate --------------------------------------------------------------------

def test_pass_rate_counts_once_per_id():
    assert pass_rate({"a": True, "b": False}) == 0.5
    assert pass_rate([("a", True), ("b", True), ("c", False)]) == pytest.approx(2 / 3)
    with pytest.raises(DuplicateId):
        pass_rate([("a", True), ("a", False)])
    with pytest.raises(ValueError):
        pass_rate([])


# -- scoring runs ------------------------------------------------------------------

def test_score_generations_em_short_circuit():
    refs = {"a": "def f(x):\n    return x + 1\n", "b": "def g(x):\n    return x * 2\n"}
    preds = {"a": "def f( x ):\n    return (x + 1)\n", "b": "def g(x):\n    return x * 3\n"}
    rows = score_generations(preds, refs)
    by_id = {r.func_id: r for r in rows}
    assert by_id["a"].exact_match and by_id["a"].crystal_bleu == 1.0
    assert not by_id["b"].exact_match and by_id["b"].crystal_bleu < 1.0


def test_score_generations_missing_reference():
    with pytest.raises(ValueError):
        score_generations({"zz": "def f():\n    return 1\n"}, {"a": "def f():\n    return 1\n"})


def test_score_generations_attaches_verdicts():
    refs = {"a": "def f():\n    return 1\n"}
    preds = {"a": "def f():\n    time.sleep(5)\n    return 1\n"}
    rows = score_generations(preds, refs, rules=builtin_rules())
    assert rows[0].verdict is not None
    assert rows[0].verdict.status == "low_quality"
    record = rows[0].to_record()
    assert record["verdict"]["status"] == "low_quality"


def test_summarize_scores_against_numpy():
    refs = {f"id{i}": f"def f(x):\n    return x + {i}\n" for i in range(10)}
    preds = {
        f"id{i}": (refs[f"id{i}"] if i % 2 == 0 else f"def f(x):\n    return x - {i}\n")
        for i in range(10)
    }
    rows = score_generations(preds, refs)
    summary = summarize_scores(rows)
    values = np.array([r.crystal_bleu for r in rows])
    assert summary["n"] == 10
    assert summary["exact_match_rate"] == 0.5
    assert summary["crystal_bleu_mean"] == pytest.approx(values.mean())
    assert summary["crystal_bleu_median"] == pytest.approx(np.median(values))
    assert summary["crystal_bleu_sd"] == pytest.approx(values.std(ddof=1))
    with pytest.raises(ValueError):
        summarize_scores([])
