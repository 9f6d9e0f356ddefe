"""Docstring and code cleaning that turns raw functions into training pairs.

Each input function yields exactly one output: a :class:`CuratedPair` or a
:class:`RejectRecord` with the stage that filtered it. Cleaning is
deterministic and idempotent: feeding accepted pairs back through produces
byte-identical pairs and no new rejects.
"""

from __future__ import annotations

import ast
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from .formatter import canonical_format
from .ingest import RawFunction
from .tokens import code_token_count, description_tokens, word_count

_TAG = re.compile(r"</?[A-Za-z][\w.:-]*(?:\s[^<>]*?)?/?>")
_LINK = re.compile(r"(?i)(?:\bhttps?://|\bwww\.)")
_DEFAULT_SECTION_HEADERS = (
    "Parameters:",
    "Returns:",
    "Args:",
    "Raises:",
    ":param",
    ":return",
)
_DEFAULT_EXAMPLE_HEADER = r"^examples?\s*::?\s*$"


class Reject(Exception):
    """A function failed a curation stage."""

    def __init__(self, stage: str, detail: str = "") -> None:
        super().__init__(stage if not detail else f"{stage}: {detail}")
        self.stage = stage
        self.detail = detail


@dataclass(frozen=True)
class RejectRecord:
    func_id: str
    stage: str
    detail: str = ""


@dataclass(frozen=True)
class CuratedPair:
    func_id: str
    description: str
    signature: str
    code: str


@dataclass(frozen=True)
class CurationConfig:
    min_words: int = 10
    max_description_tokens: int = 50
    max_code_tokens: int = 450
    max_code_chars: int = 800
    section_headers: tuple[str, ...] = _DEFAULT_SECTION_HEADERS
    example_header_pattern: str = _DEFAULT_EXAMPLE_HEADER

    def __post_init__(self) -> None:
        for name in ("min_words", "max_description_tokens", "max_code_tokens", "max_code_chars"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_CONFIG = CurationConfig()


def _drop_sections(lines: list[str], prefixes: tuple[str, ...], example_re: re.Pattern) -> list[str]:
    kept: list[str] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        stripped = line.strip()
        low = stripped.lower()
        if stripped and (low.startswith(prefixes) or example_re.match(low)):
            indent = len(line) - len(line.lstrip())
            i += 1
            while i < len(lines):
                nxt = lines[i]
                if not nxt.strip() or len(nxt) - len(nxt.lstrip()) > indent:
                    i += 1
                    continue
                break
            continue
        if stripped.startswith(">>>") or stripped.startswith("..."):
            i += 1
            continue
        kept.append(line)
        i += 1
    return kept


def clean_description(docstring: str, config: CurationConfig = DEFAULT_CONFIG) -> str:
    """Reduce a docstring to a single-line natural-language description.

    Drops structured sections (parameter/return headers and their indented
    blocks), interactive-example material, and markup tags; collapses
    whitespace. Raises :class:`Reject` for non-ASCII text, links, or
    descriptions under the word minimum.
    """
    prefixes = tuple(h.lower() for h in config.section_headers)
    example_re = re.compile(config.example_header_pattern, re.IGNORECASE)
    lines = _drop_sections(docstring.splitlines(), prefixes, example_re)
    text = "\n".join(line for line in lines if line.strip())
    if any(ord(ch) > 127 for ch in text):
        raise Reject("non_ascii")
    text = _TAG.sub(" ", text)
    if _LINK.search(text):
        raise Reject("link")
    text = " ".join(text.split())
    if word_count(text) < config.min_words:
        raise Reject("min_words", f"{word_count(text)} words")
    return text


def _is_docstring_stmt(stmt: ast.stmt) -> bool:
    return (
        isinstance(stmt, ast.Expr)
        and isinstance(stmt.value, ast.Constant)
        and isinstance(stmt.value.value, str)
    )


def _is_placeholder(stmt: ast.stmt) -> bool:
    if isinstance(stmt, ast.Pass):
        return True
    return (
        isinstance(stmt, ast.Expr)
        and isinstance(stmt.value, ast.Constant)
        and stmt.value.value is Ellipsis
    )


def clean_code(func: RawFunction, config: CurationConfig = DEFAULT_CONFIG) -> str:
    """Strip the docstring and comments and canonically format the function.

    Raises :class:`Reject` for placeholder-only bodies, test functions, and
    source that fails to parse.
    """
    source = func.to_source()
    try:
        tree = ast.parse(source)
    except (SyntaxError, ValueError) as exc:
        raise Reject("format_failure", str(exc)) from exc
    if not tree.body or not isinstance(tree.body[0], (ast.FunctionDef, ast.AsyncFunctionDef)):
        raise Reject("format_failure", "not a function definition")
    fn = tree.body[0]
    if fn.body and _is_docstring_stmt(fn.body[0]):
        fn.body = fn.body[1:]
    if not fn.body or (len(fn.body) == 1 and _is_placeholder(fn.body[0])):
        raise Reject("pass_function")
    if "test" in fn.name.lower():
        raise Reject("test_function", fn.name)
    # Nested definitions lose their docstrings too; a body emptied this way
    # keeps a pass so the function still parses.
    for node in ast.walk(fn):
        if node is fn or not isinstance(
            node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)
        ):
            continue
        if node.body and _is_docstring_stmt(node.body[0]):
            node.body = node.body[1:] or [ast.Pass()]
    try:
        return canonical_format(ast.unparse(tree))
    except (SyntaxError, ValueError) as exc:  # pragma: no cover - unparse guard
        raise Reject("format_failure", str(exc)) from exc


def length_gate(description: str, code: str, config: CurationConfig = DEFAULT_CONFIG) -> bool:
    """True when the pair is short enough to keep.

    The description must stay under the token cap; the code passes on either
    the token cap or the character cap.
    """
    if len(description_tokens(description)) > config.max_description_tokens:
        return False
    return code_token_count(code) <= config.max_code_tokens or len(code) <= config.max_code_chars


def curate(
    functions: Iterable[RawFunction],
    config: CurationConfig = DEFAULT_CONFIG,
) -> Iterator[CuratedPair | RejectRecord]:
    """Run the full cleaning pipeline over a stream of raw functions."""
    for func in functions:
        if func.docstring is None or not func.docstring.strip():
            yield RejectRecord(func.func_id, "no_docstring")
            continue
        try:
            description = clean_description(func.docstring, config)
            code = clean_code(func, config)
        except Reject as rej:
            yield RejectRecord(func.func_id, rej.stage, rej.detail)
            continue
        if not length_gate(description, code, config):
            yield RejectRecord(
                func.func_id,
                "too_long",
                f"description_tokens={len(description_tokens(description))} "
                f"code_tokens={code_token_count(code)} code_chars={len(code)}",
            )
            continue
        yield CuratedPair(
            func_id=func.func_id,
            description=description,
            signature=code.splitlines()[0],
            code=code,
        )


def curate_lists(
    functions: Iterable[RawFunction],
    config: CurationConfig = DEFAULT_CONFIG,
) -> tuple[list[CuratedPair], list[RejectRecord]]:
    """Materialized variant of :func:`curate` for small corpora and tests."""
    pairs: list[CuratedPair] = []
    rejects: list[RejectRecord] = []
    for item in curate(functions, config):
        if isinstance(item, CuratedPair):
            pairs.append(item)
        else:
            rejects.append(item)
    return pairs, rejects


def pair_to_record(pair: CuratedPair) -> dict:
    return {
        "func_id": pair.func_id,
        "description": pair.description,
        "signature": pair.signature,
        "code": pair.code,
    }


def pair_from_record(record: dict) -> CuratedPair:
    return CuratedPair(**record)


def reject_to_record(rej: RejectRecord) -> dict:
    return {"func_id": rej.func_id, "stage": rej.stage, "detail": rej.detail}


__all__ = [
    "CuratedPair",
    "CurationConfig",
    "DEFAULT_CONFIG",
    "Reject",
    "RejectRecord",
    "clean_code",
    "clean_description",
    "curate",
    "curate_lists",
    "length_gate",
    "pair_from_record",
    "pair_to_record",
    "reject_to_record",
]
