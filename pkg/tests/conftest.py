"""Shared deterministic corpus generators for the test suite.

Everything here is seed-free by construction: the same index always
produces the same function text, so tests that compare two pipeline runs
can rely on byte-identical inputs.
"""

from __future__ import annotations

from pathlib import Path

_ADJECTIVES = ("combined", "weighted", "scaled", "filtered", "running", "adjusted")
_NOUNS = ("total", "average", "summary", "balance", "score", "margin", "window")


def clean_docstring(idx: int) -> str:
    adj = _ADJECTIVES[idx % len(_ADJECTIVES)]
    noun = _NOUNS[idx % len(_NOUNS)]
    other = _NOUNS[(idx + 3) % len(_NOUNS)]
    return (
        f"Compute the {adj} {noun} of the given {other} values "
        f"for case number {idx} in the sample corpus."
    )


_CLEAN_BODIES = (
    "    total = 0\n    for value in values:\n        total += value * {k}\n    return total\n",
    "    result = []\n    for item in values:\n        if item > {k}:\n"
    "            result.append(item * 2)\n        else:\n            result.append(item - 1)\n"
    "    return result\n",
    "    parts = [str(v) for v in values if v is not None]\n    return '-'.join(parts)\n",
    "    largest = max(values)\n    smallest = min(values)\n    return largest - smallest + {k}\n",
    "    counts = {{}}\n    for value in values:\n        counts[value] = counts.get(value, 0) + 1\n"
    "    return counts\n",
    "    return [v * {k} for v in sorted(values) if v]\n",
    "    left = sum(values[::2])\n    right = sum(values[1::2])\n"
    "    if left > right:\n        return left - right\n    return right - left\n",
    "    window = values[:{k} + 2]\n    return sum(window) / len(window) if window else 0\n",
)


def make_clean_function(idx: int, name: str | None = None) -> str:
    """A curation-passing, scan-clean function; body shape varies with idx."""
    name = name or f"sample_func_{idx:05d}"
    body = _CLEAN_BODIES[idx % len(_CLEAN_BODIES)].format(k=idx % 7 + 1)
    return f'def {name}(values):\n    """{clean_docstring(idx)}"""\n{body}'


# One statement per dirty template trips exactly one built-in rule while the
# rest of the function still passes curation.
_DIRTY_BODIES = (
    ("arbitrary-sleep", "    time.sleep(5)\n    return values\n"),
    ("insecure-hash", "    digest = hashlib.md5(repr(values).encode())\n    return digest.hexdigest()\n"),
    (
        "unspecified-open-encoding",
        "    with open('data_{idx}.txt') as handle:\n        return handle.read()\n",
    ),
    ("use-sys-exit", "    if not values:\n        exit(1)\n    return values\n"),
    (
        "dead-code-after-return",
        "    total = sum(values)\n    return total\n    total += 1\n",
    ),
)


def make_dirty_function(idx: int) -> tuple[str, str]:
    """A curation-passing function that trips exactly one rule; returns
    (source, rule_id)."""
    rule_id, body = _DIRTY_BODIES[idx % len(_DIRTY_BODIES)]
    name = f"flawed_func_{idx:05d}"
    source = f'def {name}(values):\n    """{clean_docstring(idx)}"""\n{body.format(idx=idx)}'
    return source, rule_id


# -- curation violation seeds -------------------------------------------------

CURATION_STAGES = (
    "no_docstring",
    "min_words",
    "non_ascii",
    "link",
    "too_long_desc",
    "too_long_code",
    "pass_function",
    "test_function",
)

# Reject stage curate() reports for each seed kind.
EXPECTED_REJECT_STAGE = {
    "no_docstring": "no_docstring",
    "min_words": "min_words",
    "non_ascii": "non_ascii",
    "link": "link",
    "too_long_desc": "too_long",
    "too_long_code": "too_long",
    "pass_function": "pass_function",
    "test_function": "test_function",
}


def make_violation(kind: str, idx: int) -> str:
    """A function failing curation at exactly one stage."""
    name = f"seeded_{kind}_{idx:04d}"
    doc = clean_docstring(idx)
    body = "    return values[0] if values else None\n"
    if kind == "no_docstring":
        return f"def {name}(values):\n{body}"
    if kind == "min_words":
        return f'def {name}(values):\n    """Too short."""\n{body}'
    if kind == "non_ascii":
        return (
            f'def {name}(values):\n'
            f'    """Résumé of the given values computed for case {idx} '
            f'in the sample corpus."""\n{body}'
        )
    if kind == "link":
        return (
            f'def {name}(values):\n'
            f'    """See http://example.com/{idx} for the full description of the '
            f'behaviour of this function."""\n{body}'
        )
    if kind == "too_long_desc":
        words = " ".join(f"word{j}" for j in range(60))
        return f'def {name}(values):\n    """{words}"""\n{body}'
    if kind == "too_long_code":
        lines = "\n".join(f"    value_{j:03d} = {j} * 3" for j in range(170))
        return f'def {name}(values):\n    """{doc}"""\n{lines}\n    return value_000\n'
    if kind == "pass_function":
        return (
            f'def {name}(values):\n'
            f'    """Placeholder implementation awaiting the follow-up change '
            f'with full logic support."""\n    pass\n'
        )
    if kind == "test_function":
        return f'def test_seeded_{idx:04d}(values):\n    """{doc}"""\n{body}'
    raise ValueError(f"unknown violation kind {kind!r}")


# -- corpus directories -------------------------------------------------------

def write_corpus(root: Path, functions: list[str], per_file: int = 10) -> Path:
    """Write functions into numbered module files under root/corpus."""
    corpus = Path(root) / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    for start in range(0, len(functions), per_file):
        chunk = functions[start : start + per_file]
        text = '"""Generated corpus module."""\n\n\n' + "\n\n".join(chunk)
        (corpus / f"module_{start // per_file:04d}.py").write_text(text, encoding="utf-8")
    return corpus


def make_pipeline_corpus(root: Path, n_clean: int, n_dirty: int, n_violations: int) -> Path:
    """A mixed corpus exercising every pipeline stage, written under root."""
    functions = [make_clean_function(i) for i in range(n_clean)]
    functions += [make_dirty_function(i)[0] for i in range(n_dirty)]
    functions += [
        make_violation(CURATION_STAGES[i % len(CURATION_STAGES)], i) for i in range(n_violations)
    ]
    return write_corpus(root, functions)


# -- acceptance summary -------------------------------------------------------

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    rows: dict[str, str] = {}
    for key in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(key, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if key != "error" and getattr(report, "when", "call") != "call":
                continue
            name = nodeid.split("::")[-1]
            rows[name] = "PASS" if key == "passed" else "FAIL"
    if rows:
        terminalreporter.section("acceptance criteria")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]} {name}")
