"""Function extraction from Python source trees.

Every function-like node (``def``, ``async def``, ``lambda``, including
nested ones) becomes a standalone :class:`RawFunction` carrying its raw
signature and body text. Files that fail to parse fall back to a textual
recovery pass that salvages individually parseable ``def`` blocks and records
a parse-failure marker for the file.
"""

from __future__ import annotations

import ast
import hashlib
import io
import re
import tokenize
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path


class IoError(Exception):
    """A corpus file could not be read."""


class EncodingError(Exception):
    """A corpus file is not valid UTF-8 text."""


@dataclass(frozen=True)
class SourceFile:
    path: str
    content: str
    file_id: str = field(default="")

    def __post_init__(self) -> None:
        if not self.file_id:
            object.__setattr__(self, "file_id", _sha256(self.content))

    @classmethod
    def load(cls, path: str | Path) -> "SourceFile":
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc}") from exc
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"{path} is not UTF-8 text: {exc}") from exc
        return cls(path=str(path), content=text)


@dataclass(frozen=True)
class RawFunction:
    func_id: str
    file_id: str
    path: str
    name: str
    kind: str  # "function", "async_function", or "lambda"
    start_line: int  # 1-based, inclusive
    end_line: int
    start_col: int
    signature: str  # through the header colon, may span lines
    docstring: str | None
    body: str  # block-indented statement text, docstring excluded
    inline: bool  # body shares the signature line

    def to_source(self) -> str:
        """Reconstruct standalone source (docstring omitted).

        A function whose body was only a docstring gets a ``pass``
        placeholder so the result still parses; curation rejects such
        functions regardless.
        """
        if self.kind == "lambda":
            return f"{self.signature} {self.body}"
        if not self.body.strip():
            return f"{self.signature}\n    pass\n"
        if self.inline:
            return f"{self.signature} {self.body}\n"
        return f"{self.signature}\n{self.body}\n"


@dataclass(frozen=True)
class FileReject:
    path: str
    reason: str


@dataclass(frozen=True)
class ExtractResult:
    path: str
    file_id: str
    functions: list[RawFunction]
    reject: FileReject | None = None


_DEF_LINE = re.compile(r"^[ \t]*(async[ \t]+)?def[ \t]+[A-Za-z_]")


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _func_id(file_id: str, start_line: int, start_col: int, name: str) -> str:
    key = "\n".join([file_id, str(start_line), str(start_col), name])
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


def _dedent_lines(lines: list[str], amount: int) -> tuple[list[str], list[int]]:
    """Strip up to ``amount`` leading whitespace characters per line.

    Lines with less leading whitespace (bracket continuations, multiline
    string content) are stripped only as far as their own indentation, which
    keeps the block parseable. Returns the new lines and per-line strip
    counts so column offsets can be translated.
    """
    out: list[str] = []
    strips: list[int] = []
    for line in lines:
        ws = len(line) - len(line.lstrip(" \t"))
        k = min(ws, amount)
        out.append(line[k:])
        strips.append(k)
    return out, strips


def _header_colon(text: str) -> tuple[int, int]:
    """Locate the colon ending a ``def``/``lambda`` header.

    Returns (1-based row, 0-based col) of the first top-level ``:`` token.
    """
    depth = 0
    for tok in tokenize.generate_tokens(io.StringIO(text).readline):
        if tok.type == tokenize.OP:
            if tok.string in "([{":
                depth += 1
            elif tok.string in ")]}":
                depth -= 1
            elif tok.string == ":" and depth == 0:
                return tok.start
    raise SyntaxError("no header colon found")


def _is_docstring_stmt(stmt: ast.stmt) -> bool:
    return (
        isinstance(stmt, ast.Expr)
        and isinstance(stmt.value, ast.Constant)
        and isinstance(stmt.value.value, str)
    )


def _extract_def(
    node: ast.FunctionDef | ast.AsyncFunctionDef,
    lines: list[str],
    file_id: str,
    path: str,
    line_offset: int,
    col_offset: int,
) -> RawFunction:
    seg = lines[node.lineno - 1 : node.end_lineno]
    dedented, strips = _dedent_lines(seg, node.col_offset)
    seg_text = "\n".join(dedented)
    colon_row, colon_col = _header_colon(seg_text)
    sig_lines = dedented[: colon_row - 1]
    sig_lines.append(dedented[colon_row - 1][: colon_col + 1])
    signature = "\n".join(sig_lines)

    docstring: str | None = None
    remaining = node.body
    if node.body and _is_docstring_stmt(node.body[0]):
        docstring = node.body[0].value.value
        remaining = node.body[1:]

    inline = False
    if not remaining:
        body = ""
    else:
        first = remaining[0]
        rel_row = first.lineno - node.lineno  # 0-based into seg
        rel_col = first.col_offset - strips[rel_row]
        tail = dedented[rel_row + 1 :]
        if rel_row == colon_row - 1:
            inline = True
            body = "\n".join([dedented[rel_row][rel_col:], *tail])
        else:
            # The first statement can share a line with the docstring; blank
            # out the prefix so the line keeps its column but drops the text.
            first_line = dedented[rel_row]
            if docstring is not None and first.lineno == node.body[0].end_lineno:
                first_line = " " * rel_col + first_line[rel_col:]
            body = "\n".join([first_line, *tail])

    start_line = node.lineno + line_offset
    start_col = node.col_offset + col_offset
    kind = "async_function" if isinstance(node, ast.AsyncFunctionDef) else "function"
    return RawFunction(
        func_id=_func_id(file_id, start_line, start_col, node.name),
        file_id=file_id,
        path=path,
        name=node.name,
        kind=kind,
        start_line=start_line,
        end_line=node.end_lineno + line_offset,
        start_col=start_col,
        signature=signature,
        docstring=docstring,
        body=body,
        inline=inline,
    )


def _extract_lambda(
    node: ast.Lambda,
    lines: list[str],
    file_id: str,
    path: str,
    line_offset: int,
    col_offset: int,
) -> RawFunction:
    seg = lines[node.lineno - 1 : node.end_lineno]
    seg[-1] = seg[-1][: node.end_col_offset]
    seg[0] = seg[0][node.col_offset :]
    text = "\n".join(seg)
    colon_row, colon_col = _header_colon(text)
    sig_lines = seg[: colon_row - 1] + [seg[colon_row - 1][: colon_col + 1]]
    body = "\n".join([seg[colon_row - 1][colon_col + 1 :].lstrip(), *seg[colon_row:]])
    start_line = node.lineno + line_offset
    start_col = node.col_offset + col_offset
    return RawFunction(
        func_id=_func_id(file_id, start_line, start_col, "<lambda>"),
        file_id=file_id,
        path=path,
        name="<lambda>",
        kind="lambda",
        start_line=start_line,
        end_line=node.end_lineno + line_offset,
        start_col=start_col,
        signature="\n".join(sig_lines),
        docstring=None,
        body=body,
        inline=True,
    )


def _extract_from_tree(
    tree: ast.AST,
    lines: list[str],
    file_id: str,
    path: str,
    line_offset: int = 0,
    col_offset: int = 0,
) -> list[RawFunction]:
    out: list[RawFunction] = []
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            out.append(_extract_def(node, lines, file_id, path, line_offset, col_offset))
        elif isinstance(node, ast.Lambda):
            out.append(_extract_lambda(node, lines, file_id, path, line_offset, col_offset))
    out.sort(key=lambda f: (f.start_line, f.start_col))
    return out


def _recover_functions(source: SourceFile) -> list[RawFunction]:
    """Salvage parseable ``def`` blocks from a file that does not parse.

    Scans top to bottom for def lines, takes each line plus its more-indented
    block, and keeps blocks that parse on their own.
    """
    lines = source.content.splitlines()
    out: list[RawFunction] = []
    i = 0
    while i < len(lines):
        if not _DEF_LINE.match(lines[i]):
            i += 1
            continue
        indent = len(lines[i]) - len(lines[i].lstrip(" \t"))
        j = i + 1
        while j < len(lines):
            stripped = lines[j].strip()
            cur = len(lines[j]) - len(lines[j].lstrip(" \t"))
            if stripped and cur <= indent:
                break
            j += 1
        k = j
        while k > i + 1 and not lines[k - 1].strip():
            k -= 1
        block_lines, _ = _dedent_lines(lines[i:k], indent)
        block = "\n".join(block_lines)
        try:
            tree = ast.parse(block)
        except (SyntaxError, ValueError):
            i += 1
            continue
        if tree.body and isinstance(tree.body[0], (ast.FunctionDef, ast.AsyncFunctionDef)):
            out.extend(
                _extract_from_tree(
                    tree,
                    block_lines,
                    source.file_id,
                    source.path,
                    line_offset=i,
                    col_offset=indent,
                )
            )
            i = k
        else:
            i += 1
    out.sort(key=lambda f: (f.start_line, f.start_col))
    return out


def extract_file(source: SourceFile) -> ExtractResult:
    try:
        tree = ast.parse(source.content)
    except (SyntaxError, ValueError) as exc:
        reject = FileReject(path=source.path, reason=f"parse_error: {exc}")
        return ExtractResult(
            path=source.path,
            file_id=source.file_id,
            functions=_recover_functions(source),
            reject=reject,
        )
    lines = source.content.splitlines()
    functions = _extract_from_tree(tree, lines, source.file_id, source.path)
    return ExtractResult(path=source.path, file_id=source.file_id, functions=functions)


def extract_functions(source: SourceFile) -> list[RawFunction]:
    return extract_file(source).functions


def require_docstring(functions: Iterable[RawFunction]) -> Iterator[RawFunction]:
    """Keep only functions with a non-empty docstring."""
    for func in functions:
        if func.docstring is not None and func.docstring.strip():
            yield func


def discover_files(paths: Iterable[str | Path]) -> list[Path]:
    """Resolve corpus roots to a sorted list of Python files."""
    found: set[Path] = set()
    for root in paths:
        root = Path(root)
        if root.is_dir():
            found.update(p for p in root.rglob("*.py") if p.is_file())
        elif root.is_file():
            found.add(root)
        else:
            raise IoError(f"corpus path does not exist: {root}")
    return sorted(found, key=lambda p: p.as_posix())


def iter_corpus(paths: Iterable[str | Path]) -> Iterator[ExtractResult]:
    """Extract every file under the given roots in stable path order.

    Unreadable or undecodable files become reject entries rather than
    aborting the stream.
    """
    for path in discover_files(paths):
        try:
            source = SourceFile.load(path)
        except (IoError, EncodingError) as exc:
            yield ExtractResult(
                path=str(path),
                file_id="",
                functions=[],
                reject=FileReject(path=str(path), reason=str(exc)),
            )
            continue
        yield extract_file(source)


def raw_function_to_record(func: RawFunction) -> dict:
    return {
        "func_id": func.func_id,
        "file_id": func.file_id,
        "path": func.path,
        "name": func.name,
        "kind": func.kind,
        "start_line": func.start_line,
        "end_line": func.end_line,
        "start_col": func.start_col,
        "signature": func.signature,
        "docstring": func.docstring,
        "body": func.body,
        "inline": func.inline,
    }


def raw_function_from_record(record: dict) -> RawFunction:
    return RawFunction(**record)


__all__ = [
    "EncodingError",
    "ExtractResult",
    "FileReject",
    "IoError",
    "RawFunction",
    "SourceFile",
    "discover_files",
    "extract_file",
    "extract_functions",
    "iter_corpus",
    "raw_function_from_record",
    "raw_function_to_record",
    "require_docstring",
]
