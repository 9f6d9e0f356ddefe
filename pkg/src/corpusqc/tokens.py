"""Token counting and tokenization shared by curation gates and metrics."""

from __future__ import annotations

import io
import re
import string
import tokenize

_PUNCT = set(string.punctuation)

# Token types that are formatting artifacts rather than lexical content.
_NON_LEXICAL = {
    tokenize.COMMENT,
    tokenize.NL,
    tokenize.NEWLINE,
    tokenize.INDENT,
    tokenize.DEDENT,
    tokenize.ENCODING,
    tokenize.ENDMARKER,
}

_FALLBACK_TOKEN = re.compile(r"\w+|[^\w\s]")


def description_tokens(text: str) -> list[str]:
    """Split on whitespace, peeling leading/trailing punctuation into
    separate tokens: ``"sum."`` counts as two tokens, ``sum`` and ``.``.
    """
    tokens: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        while chunk and chunk[0] in _PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while chunk and chunk[-1] in _PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


def word_count(text: str) -> int:
    """Whitespace-delimited word count (punctuation stays attached)."""
    return len(text.split())


def code_tokens(code: str) -> list[str]:
    """Lexical tokens of Python source, excluding comments and
    pure-whitespace tokens. Raises on untokenizable input.
    """
    out: list[str] = []
    for tok in tokenize.generate_tokens(io.StringIO(code).readline):
        if tok.type not in _NON_LEXICAL:
            out.append(tok.string)
    return out


def code_token_count(code: str) -> int:
    return len(code_tokens(code))


def robust_code_tokens(code: str) -> list[str]:
    """Like :func:`code_tokens` but never raises: model output may not
    tokenize, in which case a word/punctuation split stands in so similarity
    scores remain defined.
    """
    try:
        return code_tokens(code)
    except (tokenize.TokenError, IndentationError, SyntaxError, ValueError):
        return _FALLBACK_TOKEN.findall(code)
