"""Lexer and recursive-descent parser for the constraint language.

Surface grammar:

    constraint := "context" TypeName [":"] "inv" [name] ":" expr
    expr       := orExpr
    orExpr     := andExpr {("or" | "xor") andExpr}
    andExpr    := unary {"and" unary}
    unary      := "not" "(" expr ")" | cmp
    cmp        := primary [("=" | "<>" | "<" | "<=" | ">" | ">=") primary]
    primary    := literal | nav | temporal | "(" expr ")"
    temporal   := ("next"|"eventually"|"always") "(" expr ")"
                | ("until"|"atLeastOnce"|"everytime") "(" expr "," expr ")"
    nav        := ("self" | varName) {"." feature | "->" iterOrCollCall}
    feature    := propertyName | builtin "(" [args] ")"
    iterOrCollCall := ("forAll"|"exists"|"select"|"collect") "(" varName "|" expr ")"
                    | ("size"|"isEmpty"|"includes"|"at"|"first") "(" [args] ")"
    literal    := "true" | "false" | INT | STRING

Binary operators associate to the left; `--` starts a line comment; string
literals use single quotes. Parsing is purely syntactic: names are resolved
and types checked in a separate pass (see typecheck).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ArityError, ParseError, SourcePosition
from . import nodes
from .nodes import (
    BOOL_OPS,
    BINARY_TEMPORAL,
    COLLECTION_CALLS,
    COMPARE_OPS,
    ITERATOR_OPS,
    TEMPORAL_OPS,
    UNARY_TEMPORAL,
    BoolOp,
    Call,
    Compare,
    ConstraintDef,
    Iterate,
    Literal,
    Navigate,
    Node,
    Not,
    SelfRef,
    TemporalOp,
    VarRef,
)

KEYWORDS = frozenset(
    ("context", "inv", "and", "or", "xor", "not", "true", "false", "self")
    + TEMPORAL_OPS
)

_SYMBOLS = ("->", "<=", ">=", "<>", "(", ")", ",", "|", ".", "=", "<", ">", ":")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, KEYWORD, INT, STRING, symbol text, EOF
    value: str | int
    pos: SourcePosition


class Lexer:
    def __init__(self, source: str):
        self.source = source
        self.index = 0
        self.line = 1
        self.column = 1

    def _pos(self) -> SourcePosition:
        return SourcePosition(self.line, self.column)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.index < len(self.source):
                if self.source[self.index] == "\n":
                    self.line += 1
                    self.column = 1
                else:
                    self.column += 1
                self.index += 1

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        src = self.source
        while self.index < len(src):
            ch = src[self.index]
            if ch in " \t\r\n":
                self._advance()
                continue
            if src.startswith("--", self.index):
                while self.index < len(src) and src[self.index] != "\n":
                    self._advance()
                continue
            pos = self._pos()
            if ch == "'":
                end = src.find("'", self.index + 1)
                if end < 0:
                    raise ParseError("unterminated string literal", pos)
                text = src[self.index + 1 : end]
                if "\n" in text:
                    raise ParseError("string literal may not span lines", pos)
                self._advance(end - self.index + 1)
                out.append(Token("STRING", text, pos))
                continue
            if ch.isdigit():
                start = self.index
                while self.index < len(src) and src[self.index].isdigit():
                    self._advance()
                out.append(Token("INT", int(src[start : self.index]), pos))
                continue
            if ch.isalpha() or ch == "_":
                start = self.index
                while self.index < len(src) and (
                    src[self.index].isalnum() or src[self.index] == "_"
                ):
                    self._advance()
                word = src[start : self.index]
                kind = "KEYWORD" if word in KEYWORDS else "IDENT"
                out.append(Token(kind, word, pos))
                continue
            for sym in _SYMBOLS:
                if src.startswith(sym, self.index):
                    self._advance(len(sym))
                    out.append(Token(sym, sym, pos))
                    break
            else:
                raise ParseError(f"unexpected character {ch!r}", pos)
        out.append(Token("EOF", "", self._pos()))
        return out


class Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = Lexer(source).tokens()
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def _advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def _error(self, expected: str) -> ParseError:
        tok = self.cur
        got = "end of input" if tok.kind == "EOF" else repr(str(tok.value))
        return ParseError(f"expected {expected}, found {got}", tok.pos)

    def _expect(self, kind: str, expected: str | None = None) -> Token:
        if self.cur.kind != kind:
            raise self._error(expected or f"{kind!r}")
        return self._advance()

    def _at_keyword(self, word: str) -> bool:
        return self.cur.kind == "KEYWORD" and self.cur.value == word

    def _expect_keyword(self, word: str) -> Token:
        if not self._at_keyword(word):
            raise self._error(f"keyword {word!r}")
        return self._advance()

    def _ident(self, what: str) -> str:
        if self.cur.kind != "IDENT":
            raise self._error(what)
        return str(self._advance().value)

    # constraint := "context" TypeName [":"] "inv" [name] ":" expr
    def parse_constraint(self, default_name: str | None = None) -> ConstraintDef:
        self._expect_keyword("context")
        type_name = self._ident("a context type name")
        if self.cur.kind == ":":
            self._advance()
        self._expect_keyword("inv")
        name = default_name
        if self.cur.kind == "IDENT":
            name = self._ident("a constraint name")
        self._expect(":", "':' after 'inv'")
        root = self.parse_expr()
        self._expect("EOF", "end of constraint")
        return ConstraintDef(
            name or f"inv_{type_name}", type_name, self.source.strip(), root
        )

    def parse_expression_only(self) -> Node:
        expr = self.parse_expr()
        self._expect("EOF", "end of expression")
        return expr

    def parse_expr(self) -> Node:
        return self._or_expr()

    def _or_expr(self) -> Node:
        left = self._and_expr()
        while self._at_keyword("or") or self._at_keyword("xor"):
            op = str(self._advance().value)
            right = self._and_expr()
            left = BoolOp(op, left, right)
        return left

    def _and_expr(self) -> Node:
        left = self._unary()
        while self._at_keyword("and"):
            self._advance()
            right = self._unary()
            left = BoolOp("and", left, right)
        return left

    def _unary(self) -> Node:
        if self._at_keyword("not"):
            self._advance()
            self._expect("(", "'(' after 'not'")
            inner = self.parse_expr()
            self._expect(")", "')' closing 'not'")
            return Not(inner)
        return self._cmp()

    def _cmp(self) -> Node:
        left = self._primary()
        if self.cur.kind in COMPARE_OPS:
            op = str(self._advance().value)
            right = self._primary()
            return Compare(op, left, right)
        return left

    def _primary(self) -> Node:
        tok = self.cur
        if tok.kind == "(":
            self._advance()
            inner = self.parse_expr()
            self._expect(")", "')'")
            return self._nav_suffix(inner)
        if tok.kind == "INT":
            self._advance()
            return Literal(int(tok.value))
        if tok.kind == "STRING":
            self._advance()
            return Literal(str(tok.value))
        if tok.kind == "KEYWORD":
            word = str(tok.value)
            if word == "true":
                self._advance()
                return Literal(True)
            if word == "false":
                self._advance()
                return Literal(False)
            if word in TEMPORAL_OPS:
                return self._temporal()
            if word == "self":
                self._advance()
                return self._nav_suffix(SelfRef())
            raise self._error("an expression")
        if tok.kind == "IDENT":
            self._advance()
            return self._nav_suffix(VarRef(str(tok.value)))
        raise self._error("an expression")

    def _temporal(self) -> Node:
        tok = self._advance()
        op = str(tok.value)
        self._expect("(", f"'(' after {op!r}")
        args = [self.parse_expr()]
        while self.cur.kind == ",":
            self._advance()
            args.append(self.parse_expr())
        self._expect(")", f"')' closing {op!r}")
        wanted = 1 if op in UNARY_TEMPORAL else 2
        if len(args) != wanted:
            raise ArityError(
                f"{op!r} takes {wanted} argument{'s' if wanted > 1 else ''},"
                f" got {len(args)}",
                tok.pos,
            )
        return TemporalOp(op, tuple(args))

    def _nav_suffix(self, base: Node) -> Node:
        node = base
        while True:
            if self.cur.kind == ".":
                self._advance()
                name = self._ident("a property or builtin name")
                if self.cur.kind == "(":
                    node = Call(node, name, self._call_args(name), arrow=False)
                else:
                    node = Navigate(node, name)
            elif self.cur.kind == "->":
                arrow_pos = self.cur.pos
                self._advance()
                name = self._ident("a collection operation name")
                if name in ITERATOR_OPS:
                    self._expect("(", f"'(' after {name!r}")
                    var = self._ident("an iterator variable name")
                    self._expect("|", "'|' after the iterator variable")
                    body = self.parse_expr()
                    self._expect(")", f"')' closing {name!r}")
                    node = Iterate(node, name, var, body)
                elif name in COLLECTION_CALLS:
                    node = Call(node, name, self._call_args(name), arrow=True)
                else:
                    raise ParseError(
                        f"unknown collection operation {name!r}", arrow_pos
                    )
            else:
                return node

    def _call_args(self, name: str) -> tuple[Node, ...]:
        self._expect("(", f"'(' after {name!r}")
        args: list[Node] = []
        if self.cur.kind != ")":
            args.append(self.parse_expr())
            while self.cur.kind == ",":
                self._advance()
                args.append(self.parse_expr())
        self._expect(")", f"')' closing {name!r}")
        return tuple(args)


def parse_constraint_source(source: str, default_name: str | None = None) -> ConstraintDef:
    """Parse a single `context T inv: expr` block. Syntax only."""
    return Parser(source).parse_constraint(default_name)


def parse_expression(source: str) -> Node:
    """Parse a bare expression (used by pattern expansion and tests)."""
    return Parser(source).parse_expression_only()


def split_constraint_blocks(text: str) -> list[tuple[int, str]]:
    """Split a constraint file into blocks separated by blank lines.

    Comment-only lines do not glue blocks together. Returns (first line
    number, block text) pairs.
    """
    blocks: list[tuple[int, str]] = []
    current: list[str] = []
    start_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("--", 1)[0].strip() if "--" in raw else raw.strip()
        if stripped:
            if not current:
                start_line = lineno
            current.append(raw)
        elif current:
            blocks.append((start_line, "\n".join(current)))
            current = []
    if current:
        blocks.append((start_line, "\n".join(current)))
    return blocks
