# # Measuring how close generated code is to a reference
#
# Two metrics, one strict and one graded. Exact match normalizes both
# sides through the canonical formatter, so cosmetic differences
# (whitespace, quote style, redundant parens) do not break a match.
# CrystalBLEU is BLEU computed after deleting the k most frequent n-grams
# of the corpus - the boilerplate every function shares - so the remaining
# overlap reflects real similarity rather than `return`, `self`, and
# friends.

import math

from corpusqc import crystal_bleu, exact_match, metric_tokens, trivially_shared_ngrams

# ## Exact match is format-insensitive

reference = 'def add(a, b):\n    return a + b\n'
reformatted = "def add(a, b):\n    return (a  +  b)\n"
different = "def add(a, b):\n    return b - a\n"

print(exact_match(reformatted, reference))
print(exact_match(different, reference))

# ## Plain BLEU first
#
# With an empty shared set, crystal_bleu is smoothed BLEU over token
# sequences. The classic near-miss: four tokens, three in common.

pred = "a b c d".split()
tgt = "a b c e".split()
score = crystal_bleu(pred, tgt, max_n=2)
print(score, "== sqrt(1/2):", math.isclose(score, math.sqrt(0.5)))

# ## Deleting what everyone shares
#
# Build the shared set from a corpus. Here every function starts with the
# same three boilerplate tokens, which would otherwise dominate the score.

corpus = [
    metric_tokens(f"def f{i}(x):\n    return x + {i}\n") for i in range(50)
]
shared = trivially_shared_ngrams(corpus, k=8)
print(f"{len(shared)} shared n-grams, e.g. {sorted(shared)[:4]}")

# Two functions that agree only on boilerplate look similar to plain BLEU
# but not after deletion.

left = metric_tokens("def f(x):\n    return x + 1\n")
right = metric_tokens("def g(y):\n    return y * 2\n")
print("plain:", round(crystal_bleu(left, right), 4))
print("after deletion:", round(crystal_bleu(left, right, shared=shared), 4))

# Identical sequences still score 1.0 no matter what was deleted.

print(crystal_bleu(left, left, shared=shared))
