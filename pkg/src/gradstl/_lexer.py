"""Tokenizer shared by the expression and formula parsers."""

import re
from dataclasses import dataclass

from .errors import FormulaSyntaxError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(){}\[\],>!&|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "number", "ident", "op" or "end"
    text: str
    pos: int


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class TokenStream:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def peek(self):
        return self.tokens[self.i]

    def peek_at(self, offset):
        j = min(self.i + offset, len(self.tokens) - 1)
        return self.tokens[j]

    def next(self):
        tok = self.tokens[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def accept(self, text):
        if self.peek.kind == "op" and self.peek.text == text:
            return self.next()
        return None

    def expect(self, text):
        tok = self.accept(text)
        if tok is None:
            found = self.peek.text or "end of input"
            raise FormulaSyntaxError(f"expected {text!r}, found {found!r}", self.peek.pos)
        return tok

    def expect_end(self):
        if self.peek.kind != "end":
            raise FormulaSyntaxError(f"unexpected {self.peek.text!r}", self.peek.pos)

    def signed_number(self):
        pos = self.peek.pos
        sign = -1.0 if self.accept("-") else 1.0
        tok = self.next()
        if tok.kind != "number":
            raise FormulaSyntaxError("expected a number", pos)
        return sign * float(tok.text)


def format_number(value):
    """Shortest text that parses back to exactly ``value``."""
    return repr(float(value))
