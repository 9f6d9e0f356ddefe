"""Declarative syntax-tree patterns with metavariables.

Pattern text is Python source with two extensions:

- ``$NAME`` is a metavariable binding one expression, statement, or
  attribute name; repeated metavariables must bind structurally equal nodes.
- ``$...NAME`` binds a run of statements.
- ``...`` is a wildcard: any argument run inside a call, any statement run
  inside a block.

A single-expression pattern matches expression nodes anywhere in a function.
A statement pattern matches inside any statement list. Block bodies written
out in a pattern match exactly, so use ``...`` to allow surrounding
statements; an omitted block (for example no ``else``) is not constrained.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field

_MV = "_cqmv_"
_MV_REST = "_cqmvs_"
_REST_RE = re.compile(r"\$\.\.\.([A-Za-z_]\w*)")
_PLAIN_RE = re.compile(r"\$([A-Za-z_]\w*)")

# Fields that are location or context bookkeeping, not structure.
_SKIP_FIELDS = {"ctx", "type_comment", "type_ignores", "kind"}


class PatternError(Exception):
    """A pattern or rule definition is malformed."""


def _mv_name(ident: str) -> str | None:
    if ident.startswith(_MV_REST):
        return ident[len(_MV_REST) :]
    if ident.startswith(_MV):
        return ident[len(_MV) :]
    return None


def _is_mv(ident: str) -> bool:
    return ident.startswith(_MV) or ident.startswith(_MV_REST)


def _is_gap_expr(node: ast.AST) -> bool:
    return isinstance(node, ast.Constant) and node.value is Ellipsis


def _is_gap_stmt(node: ast.AST) -> bool:
    return isinstance(node, ast.Expr) and _is_gap_expr(node.value)


def _is_rest_stmt(node: ast.AST) -> bool:
    return (
        isinstance(node, ast.Expr)
        and isinstance(node.value, ast.Name)
        and node.value.id.startswith(_MV_REST)
    )


def _is_mv_stmt(node: ast.AST) -> bool:
    return (
        isinstance(node, ast.Expr)
        and isinstance(node.value, ast.Name)
        and node.value.id.startswith(_MV)
        and not node.value.id.startswith(_MV_REST)
    )


def _dump(node: ast.AST) -> str:
    """Structural dump that ignores context/location bookkeeping fields."""
    parts: list[str] = [type(node).__name__, "("]
    for fname in node._fields:
        if fname in _SKIP_FIELDS:
            continue
        value = getattr(node, fname, None)
        parts.append(fname)
        parts.append("=")
        if isinstance(value, ast.AST):
            parts.append(_dump(value))
        elif isinstance(value, list):
            parts.append("[")
            parts.extend(_dump(v) if isinstance(v, ast.AST) else repr(v) for v in value)
            parts.append("]")
        else:
            parts.append(repr(value))
        parts.append(",")
    parts.append(")")
    return "".join(parts)


def _values_equal(a: object, b: object) -> bool:
    if isinstance(a, ast.AST) and isinstance(b, ast.AST):
        return _dump(a) == _dump(b)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return False


def _is_numeric_literal(node: ast.AST) -> bool:
    """Literal number, possibly signed or combined arithmetically."""
    if isinstance(node, ast.Constant):
        return isinstance(node.value, (int, float, complex)) and not isinstance(node.value, bool)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        return _is_numeric_literal(node.operand)
    if isinstance(node, ast.BinOp):
        return _is_numeric_literal(node.left) and _is_numeric_literal(node.right)
    return False


@dataclass(frozen=True)
class Constraint:
    """Side condition on a bound metavariable."""

    regex: re.Pattern | None = None
    kind: str | None = None
    not_kind: str | None = None
    binding: str | None = None

    @classmethod
    def from_spec(cls, spec: dict) -> "Constraint":
        if not isinstance(spec, dict):
            raise PatternError(f"where entry must be a mapping, got {spec!r}")
        unknown = set(spec) - {"regex", "kind", "not_kind", "binding"}
        if unknown:
            raise PatternError(f"unknown where keys: {sorted(unknown)}")
        regex = re.compile(spec["regex"]) if "regex" in spec else None
        binding = spec.get("binding")
        if binding is not None and binding != "local_function":
            raise PatternError(f"unknown binding constraint: {binding}")
        return cls(
            regex=regex,
            kind=spec.get("kind"),
            not_kind=spec.get("not_kind"),
            binding=binding,
        )


def _kind_ok(value: object, kind: str) -> bool:
    if not isinstance(value, ast.AST):
        return False
    if kind == "numeric-constant":
        return _is_numeric_literal(value)
    if kind == "Str":
        return isinstance(value, ast.Constant) and isinstance(value.value, str)
    if kind == "Num":
        return (
            isinstance(value, ast.Constant)
            and isinstance(value.value, (int, float, complex))
            and not isinstance(value.value, bool)
        )
    if kind == "Bool":
        return isinstance(value, ast.Constant) and isinstance(value.value, bool)
    if kind == "Constant":
        return isinstance(value, ast.Constant)
    return type(value).__name__ == kind


@dataclass(frozen=True)
class CompiledPattern:
    text: str
    expr: ast.expr | None  # set for expression patterns
    stmts: tuple[ast.stmt, ...]  # set for statement patterns
    where: dict[str, Constraint] = field(default_factory=dict)
    contains: tuple["CompiledPattern", ...] = ()
    required_names: frozenset[str] = frozenset()
    needs_local_function: bool = False

    @property
    def is_expression(self) -> bool:
        return self.expr is not None


def _collect_required_names(tree: ast.AST) -> frozenset[str]:
    names: set[str] = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and not _is_mv(node.id):
            names.add(node.id)
        elif isinstance(node, ast.Attribute) and not _is_mv(node.attr):
            names.add(node.attr)
        elif isinstance(node, ast.keyword) and node.arg and not _is_mv(node.arg):
            names.add(node.arg)
    return frozenset(names)


def compile_pattern(
    text: str,
    where: dict | None = None,
    contains: list | None = None,
) -> CompiledPattern:
    translated = _REST_RE.sub(rf"{_MV_REST}\1", text)
    translated = _PLAIN_RE.sub(rf"{_MV}\1", translated)
    try:
        tree = ast.parse(translated)
    except (SyntaxError, ValueError) as exc:
        raise PatternError(f"pattern does not parse: {text!r}: {exc}") from exc
    if not tree.body:
        raise PatternError(f"empty pattern: {text!r}")

    expr: ast.expr | None = None
    stmts: tuple[ast.stmt, ...] = ()
    if (
        len(tree.body) == 1
        and isinstance(tree.body[0], ast.Expr)
        and not _is_gap_stmt(tree.body[0])
        and not _is_rest_stmt(tree.body[0])
    ):
        expr = tree.body[0].value
    else:
        stmts = tuple(tree.body)

    constraints = {name: Constraint.from_spec(spec) for name, spec in (where or {}).items()}
    sub: list[CompiledPattern] = []
    for entry in contains or []:
        if isinstance(entry, str):
            sub.append(compile_pattern(entry))
        elif isinstance(entry, dict):
            sub.append(
                compile_pattern(
                    entry.get("pattern", ""),
                    where=entry.get("where"),
                    contains=entry.get("contains"),
                )
            )
        else:
            raise PatternError(f"contains entry must be string or mapping: {entry!r}")

    return CompiledPattern(
        text=text,
        expr=expr,
        stmts=stmts,
        where=constraints,
        contains=tuple(sub),
        required_names=_collect_required_names(tree),
        needs_local_function=any(c.binding == "local_function" for c in constraints.values()),
    )


class FunctionIndex:
    """Single-pass index over one function's syntax tree.

    Buckets nodes by type and by callee identifiers so rule matching can skip
    functions that cannot possibly contain a pattern.
    """

    def __init__(self, tree: ast.AST, source: str) -> None:
        self.tree = tree
        self.source = source
        self._source_bytes: bytes | None = None
        self._line_offsets: list[int] | None = None
        self.nodes_by_type: dict[type, list[ast.AST]] = {}
        self.stmt_lists: list[list[ast.stmt]] = []
        self.all_names: set[str] = set()
        self.local_function_names: set[str] = set()
        self.call_idents: dict[str, list[ast.Call]] = {}
        self._build()

    def _build(self) -> None:
        for node in ast.walk(self.tree):
            self.nodes_by_type.setdefault(type(node), []).append(node)
            if isinstance(node, ast.Name):
                self.all_names.add(node.id)
            elif isinstance(node, ast.Attribute):
                self.all_names.add(node.attr)
            elif isinstance(node, ast.keyword) and node.arg:
                self.all_names.add(node.arg)
            elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
                self.all_names.add(node.name)
                self.local_function_names.add(node.name)
            if isinstance(node, ast.Call):
                for ident in _callee_chain(node.func):
                    self.call_idents.setdefault(ident, []).append(node)
            for fname in ("body", "orelse", "finalbody"):
                block = getattr(node, fname, None)
                if isinstance(block, list) and block and isinstance(block[0], ast.stmt):
                    self.stmt_lists.append(block)

    def nodes_of(self, node_type: type) -> list[ast.AST]:
        return self.nodes_by_type.get(node_type, [])

    def segment(self, node: ast.AST) -> str:
        """Source text of a located node (byte-offset slicing)."""
        if self._source_bytes is None:
            self._source_bytes = self.source.encode("utf-8")
            offsets = [0]
            for line in self._source_bytes.splitlines(keepends=True):
                offsets.append(offsets[-1] + len(line))
            self._line_offsets = offsets
        start = self._line_offsets[node.lineno - 1] + node.col_offset
        end = self._line_offsets[node.end_lineno - 1] + node.end_col_offset
        return self._source_bytes[start:end].decode("utf-8", errors="replace")


def _callee_chain(func: ast.expr) -> list[str]:
    """Concrete identifiers along a callee expression like a.b.c()."""
    idents: list[str] = []
    node = func
    while isinstance(node, ast.Attribute):
        if not _is_mv(node.attr):
            idents.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name) and not _is_mv(node.id):
        idents.append(node.id)
    return idents


class Matcher:
    """Matches compiled patterns against an indexed function."""

    def __init__(self, index: FunctionIndex) -> None:
        self.index = index

    # -- core structural matching -----------------------------------------

    def _bind(self, env: dict, name: str, value: object) -> dict | None:
        prev = env.get(name)
        if prev is None:
            new_env = dict(env)
            new_env[name] = value
            return new_env
        return env if _values_equal(prev, value) else None

    def match_node(self, pat: ast.AST, node: ast.AST, env: dict) -> dict | None:
        if isinstance(pat, ast.Name):
            name = _mv_name(pat.id)
            if name is not None:
                return self._bind(env, name, node)
        if _is_gap_expr(pat):
            return env
        if _is_mv_stmt(pat) and isinstance(node, ast.stmt):
            return self._bind(env, _mv_name(pat.value.id), node)
        if type(pat) is not type(node):
            return None
        if isinstance(pat, ast.Constant):
            pv, nv = pat.value, node.value
            if type(pv) is type(nv) and pv == nv:
                return env
            return None
        if isinstance(pat, ast.Call):
            return self._match_call(pat, node, env)
        return self._match_fields(pat, node, env)

    def _match_fields(self, pat: ast.AST, node: ast.AST, env: dict) -> dict | None:
        for fname in pat._fields:
            if fname in _SKIP_FIELDS:
                continue
            pv = getattr(pat, fname, None)
            nv = getattr(node, fname, None)
            if isinstance(pv, ast.AST):
                if not isinstance(nv, ast.AST):
                    return None
                env = self.match_node(pv, nv, env)
            elif isinstance(pv, list):
                if not isinstance(nv, list):
                    return None
                env = self._match_list(pv, nv, env)
            elif isinstance(pv, str):
                name = _mv_name(pv)
                if name is not None:
                    if not isinstance(nv, str):
                        return None
                    env = self._bind(env, name, nv)
                elif pv != nv:
                    return None
            elif pv is None:
                if nv is not None:
                    return None
            elif pv != nv:
                return None
            if env is None:
                return None
        return env


    def _match_list(self, pats: list, nodes: list, env: dict) -> dict | None:
        if pats and isinstance(pats[0], ast.stmt):
            return self._match_stmt_exact(pats, nodes, env)
        if not pats:
            # An omitted block places no constraint; an empty expression
            # list (for example call args) requires emptiness.
            if nodes and isinstance(nodes[0], ast.stmt):
                return env
            return env if not nodes else None
        return self._match_expr_seq(pats, nodes, env)

    def _match_expr_seq(self, pats: list, nodes: list, env: dict) -> dict | None:
        if not pats:
            return env if not nodes else None
        head = pats[0]
        if _is_gap_expr(head):
            for i in range(len(nodes) + 1):
                result = self._match_expr_seq(pats[1:], nodes[i:], env)
                if result is not None:
                    return result
            return None
        if not nodes:
            return None
        bound = self.match_node(head, nodes[0], env)
        if bound is None:
            return None
        return self._match_expr_seq(pats[1:], nodes[1:], bound)

    def _match_call(self, pat: ast.Call, node: ast.Call, env: dict) -> dict | None:
        env = self.match_node(pat.func, node.func, env)
        if env is None:
            return None
        has_gap = any(_is_gap_expr(a) for a in pat.args)
        env = self._match_expr_seq(pat.args, node.args, env)
        if env is None:
            return None
        used: set[int] = set()
        for pkw in pat.keywords:
            hit = None
            for i, nkw in enumerate(node.keywords):
                if i not in used and nkw.arg == pkw.arg:
                    hit = i
                    break
            if hit is None:
                return None
            env = self.match_node(pkw.value, node.keywords[hit].value, env)
            if env is None:
                return None
            used.add(hit)
        if not has_gap and len(used) != len(node.keywords):
            return None
        return env

    def _match_stmt_exact(self, pats: list, nodes: list, env: dict) -> dict | None:
        if not pats:
            return env if not nodes else None
        head = pats[0]
        if _is_gap_stmt(head):
            for i in range(len(nodes) + 1):
                result = self._match_stmt_exact(pats[1:], nodes[i:], env)
                if result is not None:
                    return result
            return None
        if _is_rest_stmt(head):
            name = _mv_name(head.value.id)
            splits = range(len(nodes) + 1) if len(pats) > 1 else [len(nodes)]
            for i in splits:
                bound = self._bind(env, name, list(nodes[:i]))
                if bound is None:
                    continue
                result = self._match_stmt_exact(pats[1:], nodes[i:], bound)
                if result is not None:
                    return result
            return None
        if not nodes:
            return None
        bound = self.match_node(head, nodes[0], env)
        if bound is None:
            return None
        return self._match_stmt_exact(pats[1:], nodes[1:], bound)

    def _match_stmt_prefix(self, pats: list, nodes: list, env: dict) -> tuple[dict, int] | None:
        """Match at the start of ``nodes``; trailing statements are allowed.

        Returns the environment and the number of statements consumed.
        """
        if not pats:
            return env, 0
        head = pats[0]
        if _is_gap_stmt(head):
            for i in range(len(nodes) + 1):
                result = self._match_stmt_prefix(pats[1:], nodes[i:], env)
                if result is not None:
                    return result[0], result[1] + i
            return None
        if _is_rest_stmt(head):
            name = _mv_name(head.value.id)
            splits = range(len(nodes) + 1) if len(pats) > 1 else [len(nodes)]
            for i in splits:
                bound = self._bind(env, name, list(nodes[:i]))
                if bound is None:
                    continue
                result = self._match_stmt_prefix(pats[1:], nodes[i:], bound)
                if result is not None:
                    return result[0], result[1] + i
            return None
        if not nodes:
            return None
        bound = self.match_node(head, nodes[0], env)
        if bound is None:
            return None
        result = self._match_stmt_prefix(pats[1:], nodes[1:], bound)
        if result is None:
            return None
        return result[0], result[1] + 1

    # -- constraints and search -------------------------------------------

    def _where_ok(self, pattern: CompiledPattern, env: dict) -> bool:
        for name, constraint in pattern.where.items():
            value = env.get(name)
            if value is None:
                return False
            if constraint.kind is not None and not _kind_ok(value, constraint.kind):
                return False
            if constraint.not_kind is not None and isinstance(value, ast.AST) and _kind_ok(
                value, constraint.not_kind
            ):
                return False
            if constraint.binding == "local_function":
                if not isinstance(value, ast.Name):
                    return False
                if value.id not in self.index.local_function_names:
                    return False
            if constraint.regex is not None:
                text = self._text_of(value)
                if text is None or not constraint.regex.search(text):
                    return False
        return True

    def _text_of(self, value: object) -> str | None:
        if isinstance(value, str):
            return value
        if isinstance(value, ast.Constant):
            return str(value.value)
        if isinstance(value, ast.AST) and hasattr(value, "lineno"):
            return self.index.segment(value)
        return None

    def _contains_ok(self, pattern: CompiledPattern, anchor: object, env: dict) -> bool:
        if not pattern.contains:
            return True
        if isinstance(anchor, ast.AST):
            domain = list(ast.walk(anchor))
        else:
            domain = []
            for stmt in anchor:
                domain.extend(ast.walk(stmt))
        for sub in pattern.contains:
            if sub.is_expression:
                for node in domain:
                    bound = self.match_node(sub.expr, node, dict(env))
                    if bound is not None and self._where_ok(sub, bound):
                        return True
            else:
                for node in domain:
                    for fname in ("body", "orelse", "finalbody"):
                        block = getattr(node, fname, None)
                        if not (isinstance(block, list) and block and isinstance(block[0], ast.stmt)):
                            continue
                        for start in range(len(block)):
                            hit = self._match_stmt_prefix(list(sub.stmts), block[start:], dict(env))
                            if hit is not None and self._where_ok(sub, hit[0]):
                                return True
        return False

    def _candidates(self, pattern: CompiledPattern) -> list[ast.AST]:
        expr = pattern.expr
        if isinstance(expr, ast.Call):
            idents = _callee_chain(expr.func)
            if idents:
                buckets = [self.index.call_idents.get(ident) for ident in idents]
                if any(b is None for b in buckets):
                    return []
                return min(buckets, key=len)
            return self.index.nodes_of(ast.Call)
        return self.index.nodes_of(type(expr))

    def iter_matches(self, pattern: CompiledPattern, env0: dict | None = None):
        """Yield (anchor, env, span) for every site the pattern matches.

        ``anchor`` is the matched node (expression or single-statement
        patterns) or the matched statement slice; ``span`` is a function-
        relative (start_line, start_col, end_line, end_col) tuple.
        """
        env0 = env0 or {}
        if not pattern.required_names <= self.index.all_names:
            return
        if pattern.needs_local_function and not self.index.local_function_names:
            return

        if pattern.is_expression:
            for node in self._candidates(pattern):
                env = self.match_node(pattern.expr, node, dict(env0))
                if env is None or not self._where_ok(pattern, env):
                    continue
                if not self._contains_ok(pattern, node, env):
                    continue
                yield node, env, _span(node)
            return

        pats = list(pattern.stmts)
        single = (
            len(pats) == 1
            and not _is_gap_stmt(pats[0])
            and not _is_rest_stmt(pats[0])
            and not _is_mv_stmt(pats[0])
        )
        if single:
            for node in self.index.nodes_of(type(pats[0])):
                env = self.match_node(pats[0], node, dict(env0))
                if env is None or not self._where_ok(pattern, env):
                    continue
                if not self._contains_ok(pattern, node, env):
                    continue
                yield node, env, _span(node)
            return

        first = pats[0]
        first_type = None
        if not _is_gap_stmt(first) and not _is_rest_stmt(first) and not _is_mv_stmt(first):
            first_type = type(first)
        for block in self.index.stmt_lists:
            for start in range(len(block)):
                if first_type is not None and type(block[start]) is not first_type:
                    continue
                hit = self._match_stmt_prefix(pats, block[start:], dict(env0))
                if hit is None:
                    continue
                env, consumed = hit
                if consumed == 0 or not self._where_ok(pattern, env):
                    continue
                matched = block[start : start + consumed]
                if not self._contains_ok(pattern, matched, env):
                    continue
                yield matched, env, _span_slice(matched)

    def matches_anywhere(self, pattern: CompiledPattern, env0: dict) -> bool:
        for _ in self.iter_matches(pattern, env0):
            return True
        return False

    def matches_at(self, pattern: CompiledPattern, node: ast.AST) -> bool:
        """Match an expression pattern against one specific node."""
        if not pattern.is_expression:
            return False
        env = self.match_node(pattern.expr, node, {})
        if env is None or not self._where_ok(pattern, env):
            return False
        return self._contains_ok(pattern, node, env)


def _span(node: ast.AST) -> tuple[int, int, int, int]:
    return (node.lineno, node.col_offset, node.end_lineno, node.end_col_offset)


def _span_slice(stmts: list[ast.stmt]) -> tuple[int, int, int, int]:
    return (
        stmts[0].lineno,
        stmts[0].col_offset,
        stmts[-1].end_lineno,
        stmts[-1].end_col_offset,
    )


__all__ = [
    "CompiledPattern",
    "Constraint",
    "FunctionIndex",
    "Matcher",
    "PatternError",
    "compile_pattern",
]
