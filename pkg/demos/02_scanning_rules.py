# # Scanning code with declarative quality rules
#
# The scanner matches rule patterns against a function's syntax tree.
# Patterns look like Python with holes in them: `$X` binds any single
# expression (and must bind consistently within one pattern), `...` matches
# any argument run or statement gap, and `$...BODY` binds a run of
# statements. Seventeen built-in rules cover security, correctness,
# best-practice, compatibility, maintainability, and performance issues.

from corpusqc import builtin_rules, combine_rulesets, parse_ruleset, scan_code

rules = builtin_rules()
print(f"{len(rules)} built-in rules:")
for rule in rules:
    cwe = f"  [{rule.cwe}]" if rule.cwe else ""
    print(f"  {rule.rule_id:<32} {rule.category}/{rule.severity}{cwe}")

# ## A function with problems
#
# This function trips three different rules: an insecure hash, a fixed
# sleep, and a request without a timeout.

FLAWED = '''
def fetch_token(url, secret):
    """Fetch an access token from the auth endpoint."""
    import hashlib
    import time
    import requests

    digest = hashlib.md5(secret.encode()).hexdigest()
    time.sleep(3)
    response = requests.get(url, params={"sig": digest})
    return response.json()["token"]
'''

verdict = scan_code("fetch_token", FLAWED, rules)
print(f"\nstatus: {verdict.status}")
for finding in verdict.findings:
    print(f"  line {finding.start_line}: {finding.rule_id} - {finding.message}")

# ## The verdict partition
#
# Every scanned function lands in exactly one of three buckets: clean,
# low_quality (at least one finding), or syntactically_incorrect (the text
# is not a single parsable function definition).

for code in ("def ok(x):\n    return x + 1\n", "def broken(x:\n    return x\n"):
    print(scan_code("probe", code, rules).status)

# ## Adding your own rule
#
# Rules are data, not code. A YAML document declares the id, category,
# severity, message, and one or more patterns; `where` clauses refine what
# a metavariable may bind to.

CUSTOM = """
rules:
  - id: no-print
    category: best-practice
    severity: info
    message: use logging instead of print in library code
    match:
      any:
        - pattern: "print(...)"
"""

combined = combine_rulesets(rules, parse_ruleset(CUSTOM))
verdict = scan_code("noisy", "def noisy(x):\n    print(x)\n    return x\n", combined)
print([f.rule_id for f in verdict.findings])

# Metavariable consistency is what makes patterns precise: the built-in
# identical-if-else-branches rule uses the same `$...BODY` hole for both
# branches, so it only fires when the two blocks are structurally equal.

DUPLICATED = '''
def pick(flag, x):
    if flag:
        return x + 1
    else:
        return x + 1
'''

verdict = scan_code("pick", DUPLICATED, rules)
print([f.rule_id for f in verdict.findings])
