"""Canonical code formatting.

The pipeline never compares raw source text. Every code comparison (exact
match, dataset emission, deduplicated fixtures) goes through
:func:`canonical_format` first, so the only properties the formatter must
guarantee are determinism and idempotence. The default implementation parses
to an AST and unparses, which additionally normalizes quotes, drops comments
and blank lines, and indents with four spaces. Any formatter with the same
two guarantees can be passed wherever a ``formatter`` argument is accepted.
"""

from __future__ import annotations

import ast


def canonical_format(code: str) -> str:
    """Return the canonical form of ``code``.

    Raises SyntaxError when the input does not parse; callers decide whether
    that is a rejection (curation) or a fallback (metric scoring).
    """
    tree = ast.parse(code)
    return ast.unparse(tree) + "\n"


def is_canonical(code: str) -> bool:
    try:
        return canonical_format(code) == code
    except SyntaxError:
        return False
