"""Tokenizer for MERLAN source text.

Line-oriented with an offside rule: changes in leading whitespace produce
INDENT/DEDENT tokens, always balanced before the final EOF. "//" comments
run to end of line. A colon directly after a section keyword, or at the end
of a bare identifier line (an entity or requirement name), is consumed and
discarded; attribute colons are kept.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .model import Span

SECTION_KEYWORDS = ("ENTITIES", "CONCRETE", "ABSTRACT", "REQUIREMENTS")
OPERATOR_KEYWORDS = ("AND", "OR", "NOT")


class TokenKind(Enum):
    SECTION = "section"
    OPERATOR = "operator"
    IDENT = "ident"
    STRING = "string"
    NUMBER = "number"
    QUESTION = "?"
    DASH = "-"
    COLON = ":"
    LBRACKET = "["
    RBRACKET = "]"
    DOTDOT = ".."
    STAR = "*"
    NEWLINE = "newline"
    INDENT = "indent"
    DEDENT = "dedent"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.column, self.line, self.column + max(len(self.text), 1))


class LexError(Exception):
    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")

    @property
    def span(self) -> Span:
        return Span.point(self.line, self.column)


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"[0-9]+(\.[0-9]+)?")


def tokenize(source: str) -> list[Token]:
    """Tokenize MERLAN source; raises LexError on lexical faults.

    CRLF line endings are normalized to LF first. Indentation must use a
    single whitespace character kind (all spaces or all tabs) per file.
    """
    source = source.replace("\r\n", "\n").replace("\r", "\n")
    tokens: list[Token] = []
    indent_stack = [0]
    indent_char: str | None = None

    for line_no, raw in enumerate(source.split("\n"), start=1):
        ws_len = 0
        for ch in raw:
            if ch in (" ", "\t"):
                ws_len += 1
            else:
                break
        indent_text = raw[:ws_len]
        body = raw[ws_len:]
        if not body or body.startswith("//"):
            continue

        if " " in indent_text and "\t" in indent_text:
            raise LexError("mixed tabs and spaces in indentation", line_no, 1)
        if indent_text:
            this_char = indent_text[0]
            if indent_char is None:
                indent_char = this_char
            elif this_char != indent_char:
                raise LexError("mixed tabs and spaces in indentation", line_no, 1)

        width = len(indent_text)
        if width > indent_stack[-1]:
            indent_stack.append(width)
            tokens.append(Token(TokenKind.INDENT, indent_text, line_no, 1))
        else:
            while width < indent_stack[-1]:
                indent_stack.pop()
                tokens.append(Token(TokenKind.DEDENT, "", line_no, 1))
            if width != indent_stack[-1]:
                raise LexError(
                    "dedent does not match any outer indentation level", line_no, 1
                )

        line_tokens = _lex_line(body, line_no, ws_len + 1)
        tokens.extend(_drop_name_colons(line_tokens))
        last = line_tokens[-1]
        tokens.append(
            Token(TokenKind.NEWLINE, "", last.line, last.column + len(last.text))
        )

    while len(indent_stack) > 1:
        indent_stack.pop()
        tokens.append(Token(TokenKind.DEDENT, "", _last_line(source), 1))
    tokens.append(Token(TokenKind.EOF, "", _last_line(source), 1))
    return tokens


def _last_line(source: str) -> int:
    return source.count("\n") + 1


def _lex_line(body: str, line_no: int, start_col: int) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(body)
    while i < n:
        ch = body[i]
        col = start_col + i
        if ch in (" ", "\t"):
            i += 1
            continue
        if body.startswith("//", i):
            break
        if ch == '"':
            text, consumed = _lex_string(body, i, line_no, col)
            tokens.append(Token(TokenKind.STRING, text, line_no, col))
            i += consumed
            continue
        if "0" <= ch <= "9":
            m = _NUMBER_RE.match(body, i)
            assert m is not None
            tokens.append(Token(TokenKind.NUMBER, m.group(0), line_no, col))
            i = m.end()
            continue
        m = _IDENT_RE.match(body, i)
        if m:
            word = m.group(0)
            if word in SECTION_KEYWORDS:
                kind = TokenKind.SECTION
            elif word in OPERATOR_KEYWORDS:
                kind = TokenKind.OPERATOR
            else:
                kind = TokenKind.IDENT
            tokens.append(Token(kind, word, line_no, col))
            i = m.end()
            continue
        if body.startswith("..", i):
            tokens.append(Token(TokenKind.DOTDOT, "..", line_no, col))
            i += 2
            continue
        simple = {
            "?": TokenKind.QUESTION,
            "-": TokenKind.DASH,
            ":": TokenKind.COLON,
            "[": TokenKind.LBRACKET,
            "]": TokenKind.RBRACKET,
            "*": TokenKind.STAR,
        }.get(ch)
        if simple is not None:
            tokens.append(Token(simple, ch, line_no, col))
            i += 1
            continue
        raise LexError(f"illegal character {ch!r}", line_no, col)
    if not tokens:
        # Caller skips blank/comment lines, so a body always yields tokens.
        raise LexError("empty line reached lexer", line_no, start_col)
    return tokens


def _lex_string(body: str, i: int, line_no: int, col: int) -> tuple[str, int]:
    out: list[str] = []
    j = i + 1
    while j < len(body):
        ch = body[j]
        if ch == "\\":
            if j + 1 >= len(body):
                break
            nxt = body[j + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            j += 2
            continue
        if ch == '"':
            return "".join(out), j + 1 - i
        out.append(ch)
        j += 1
    raise LexError("unterminated string literal", line_no, col)


def _drop_name_colons(line_tokens: list[Token]) -> list[Token]:
    """Discard optional trailing colons after section keywords and name lines."""
    out: list[Token] = []
    last_index = len(line_tokens) - 1
    for idx, tok in enumerate(line_tokens):
        if tok.kind is TokenKind.COLON and out:
            prev = out[-1]
            if prev.kind is TokenKind.SECTION:
                continue
            if prev.kind is TokenKind.IDENT and idx == last_index:
                continue
        out.append(tok)
    return out
