# # Turning scan verdicts into report artifacts
#
# After scanning a corpus (or a batch of model generations) you have one
# verdict per function. The reporting layer aggregates those into an issue
# breakdown, a category-to-rule-to-severity flow for Sankey diagrams, a
# side-by-side model comparison table, and markdown.

from corpusqc import (
    breakdown,
    builtin_rules,
    comparison_table,
    render_markdown,
    sankey_data,
    scan_code,
)

# ## Scan a small batch
#
# Mix clean functions with flawed ones so the aggregate has something to
# say.

CLEAN = "def scale_{i}(x):\n    return x * {i}\n"
FLAWED = (
    "def risky_{i}(cmd, path):\n"
    "    import os, hashlib\n"
    "    os.system('convert ' + path)\n"
    "    return hashlib.md5(cmd.encode()).hexdigest()\n"
)

rules = builtin_rules()
verdicts = []
for i in range(30):
    template = FLAWED if i % 3 == 0 else CLEAN
    verdicts.append(scan_code(f"func{i:02d}", template.format(i=i), rules))

# ## The issue breakdown
#
# One pass over the verdicts produces status counts, findings per category
# and severity, and issue density (findings per low-quality function).

bd = breakdown(verdicts)
print("status:", bd.status_counts)
print("density:", round(bd.issue_density, 3))
print("categories:", bd.category_counts)
print("top security rules:", bd.top_rules("security"))

# ## Flow data for a Sankey diagram
#
# Nodes come in three layers (category, rule, severity); link values are
# finding counts, so flow is conserved through the middle layer.

flow = sankey_data(bd)
print(f"{len(flow['nodes'])} nodes, {len(flow['links'])} links")
for link in flow["links"][:3]:
    print(" ", link)

# ## Comparing model runs
#
# Verdict sets for the same function ids - say, generations from models
# trained on different data - line up in a comparison table.

def generation_verdicts(flaw_every: int):
    rows = []
    for i in range(60):
        template = FLAWED if i % flaw_every == 0 else CLEAN
        rows.append(scan_code(f"gen{i:02d}", template.format(i=i), rules))
    return rows

table = comparison_table(
    {
        "trained_on_everything": generation_verdicts(4),
        "trained_on_clean_data": generation_verdicts(15),
    }
)
for row in table.rows:
    record = row.to_record()
    print(record["model_id"], f"{record['pct_low_quality']:.1f}% low quality")

# ## Markdown for humans

print()
print(render_markdown(table))
