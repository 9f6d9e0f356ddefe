# # Deciding whether one model actually beats another
#
# When two models answer the same tasks, their results are paired, and the
# right questions are about the disagreements. This walkthrough covers the
# full testing stack: McNemar's test for paired pass/fail outcomes with an
# odds ratio as effect size, Benjamini-Hochberg to control the false
# discovery rate across many comparisons, the Wilcoxon signed-rank test and
# Cliff's delta for paired scores, and an Anderson-Darling normality check
# that explains why the rank test is the right tool.

import numpy as np

from corpusqc import (
    anderson_darling_normality,
    benjamini_hochberg,
    cliffs_delta,
    compare_models,
    confusion_counts,
    mcnemar,
    wilcoxon_signed_rank,
)

# ## Paired pass/fail outcomes
#
# 200 tasks, two models. Only the discordant pairs matter: tasks where
# exactly one model succeeded.

rng = np.random.RandomState(11)
skill = rng.uniform(0.2, 0.9, size=200)
model_a = rng.uniform(size=200) < skill          # the stronger model
model_b = rng.uniform(size=200) < skill - 0.15   # handicapped

counts = confusion_counts(list(model_a), list(model_b))
print(counts)

result = mcnemar(counts)
print(f"{result.test_name}: p={result.p_value:.6f} {result.effect_name}={result.effect_size:.2f}")

# Small discordant totals switch to the exact binomial form automatically.

print(mcnemar(9, 2).test_name, round(mcnemar(9, 2).p_value, 4))

# ## Many comparisons at once
#
# Testing several model pairs inflates false positives; Benjamini-Hochberg
# adjusts the p-values so the expected share of false discoveries stays at
# the nominal level.

raw = [0.01, 0.02, 0.04, 0.20, 0.62]
print(benjamini_hochberg(raw))

# ## Paired scores instead of pass/fail
#
# Per-task similarity scores are bounded and skewed, nothing like normal,
# which the normality test confirms. So the paired comparison uses ranks.

scores_a = np.clip(rng.beta(8, 2, size=60), 0, 1)
scores_b = np.clip(scores_a - rng.uniform(0, 0.08, size=60), 0, 1)

normality = anderson_darling_normality(list(scores_a))
print(f"normality: A2*={normality.statistic:.3f} p={normality.p_value:.4f}")

w = wilcoxon_signed_rank(list(scores_a), list(scores_b))
print(f"{w.test_name}: W={w.statistic} p={w.p_value:.2e}")

delta = cliffs_delta(list(scores_a), list(scores_b))
print(f"cliffs_delta={delta:.3f}")

# ## The one-call version
#
# compare_models() picks the right test per comparison - McNemar for
# boolean vectors, Wilcoxon plus Cliff's delta for real ones - and adjusts
# all p-values as one family.

comparisons = [
    ("a_vs_b_pass", list(model_a), list(model_b)),
    ("a_vs_b_score", list(scores_a), list(scores_b)),
]
for row in compare_models(comparisons):
    effect = f" {row.effect_name}={row.effect_size:.3f}" if row.effect_name else ""
    print(f"{row.label}: {row.test_name} p={row.p_value:.3g} adjusted={row.adjusted_p:.3g}{effect}")
