"""Recursive-descent parser for the EPTL text syntax.

Grammar (whitespace-insensitive), loosest binding first::

    formula := implies
    implies := or ("=>" implies)?
    or      := and ("|" and)*
    and     := until ("&" until)*
    until   := unary (("U" | "W") until)?
    unary   := ("!" | "EX" | "AX" | "F" | "G") unary | atom
    atom    := "true" | "false" | "(" formula ")" | prop
    prop    := ident "(" [pat ("," pat)*] ")" [("==" | "contains") pat]
    pat     := integer | string | "true" | "false" | ident | "_"

An identifier in pattern position is a variable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import ParseError
from .formula import (
    AX,
    EX,
    And,
    Contains,
    Equals,
    F,
    FalseF,
    Formula,
    G,
    Implies,
    Literal,
    Not,
    Or,
    Prop,
    Proposition,
    TrueF,
    Until,
    Var,
    W,
    Wildcard,
)

KEYWORDS = {"true", "false", "EX", "AX", "F", "G", "U", "W", "contains"}
_UNARY = {"!": Not, "EX": EX, "AX": AX, "F": F, "G": G}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>=>|==|[()!,&|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "string", "int", "ident", "sym", "kw", "eof"
    text: str
    pos: int


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, value, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def fail(self, expected):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.pos, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail({text})
        return self.advance()

    def parse(self) -> Formula:
        f = self.implies()
        if self.tok.kind != "eof":
            self.fail({"=>", "|", "&", "U", "W", "end of input"})
        return f

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.at("=>"):
            self.advance()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.until()
        while self.at("&"):
            self.advance()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        left = self.unary()
        if self.at("U", "W"):
            node = Until if self.advance().text == "U" else W
            return node(left, self.until())
        return left

    def unary(self) -> Formula:
        t = self.tok
        if t.kind in ("sym", "kw") and t.text in _UNARY:
            self.advance()
            return _UNARY[t.text](self.unary())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if self.at("true"):
            self.advance()
            return TrueF()
        if self.at("false"):
            self.advance()
            return FalseF()
        if self.at("("):
            self.advance()
            f = self.implies()
            self.expect(")")
            return f
        if t.kind == "ident":
            return Prop(self.prop())
        self.fail({"true", "false", "(", "!", "EX", "AX", "F", "G", "identifier"})

    def prop(self) -> Proposition:
        name = self.advance().text
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.pattern())
            while self.at(","):
                self.advance()
                args.append(self.pattern())
        self.expect(")")
        pred = None
        if self.at("=="):
            self.advance()
            pred = Equals(self.pattern())
        elif self.at("contains"):
            self.advance()
            pred = Contains(self.pattern())
        return Proposition(name, tuple(args), pred)

    def pattern(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Literal(int(t.text))
        if t.kind == "string":
            self.advance()
            try:
                return Literal(json.loads(t.text))
            except json.JSONDecodeError:
                raise ParseError("malformed string literal", t.pos) from None
        if self.at("true", "false"):
            self.advance()
            return Literal(t.text == "true")
        if t.kind == "ident":
            self.advance()
            return Wildcard() if t.text == "_" else Var(t.text)
        self.fail({"integer", "string", "true", "false", "identifier", "_"})


def parse(text: str) -> Formula:
    """Parse formula text into an AST; raises ParseError with position and expectations."""
    return _Parser(text).parse()
