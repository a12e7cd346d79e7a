"""Job description text -> attribute statements with parsed expressions.

Statement form is `Name = expression ;`. Comments run from `#` or `//` to
end of line. Operator precedence, loosest first:

    ||  <  &&  <  == != < <= > >=  <  + -  <  * /  <  unary ! -

Bare identifiers reference the document's own attributes; `other.Name` and
`self.Name` select a scope explicitly. `Member(v, list)` is the only call.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DuplicateAttribute, JdlSyntaxError
from .expr import AttrRef, Binary, Expr, ListExpr, Literal, MemberCall, UNDEFINED, Unary

_SYMBOLS = ["&&", "||", "==", "!=", "<=", ">=", "=", ";", "{", "}", "(", ")", ",", ".",
            "!", "<", ">", "+", "-", "*", "/"]

_KEYWORDS = {"true": True, "false": False, "undefined": UNDEFINED}


@dataclass
class Token:
    kind: str  # ident, string, int, double, sym, eof
    text: str
    value: object
    line: int
    col: int


def _err(message, line, col):
    return JdlSyntaxError(f"line {line}, column {col}: {message}")


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k=1):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance()
            continue
        if ch == "#" or text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if ch == '"':
            advance()
            buf = []
            while i < n and text[i] != '"':
                if text[i] == "\\":
                    advance()
                    if i >= n:
                        break
                    esc = text[i]
                    buf.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    advance()
                else:
                    if text[i] == "\n":
                        raise _err("unterminated string literal", start_line, start_col)
                    buf.append(text[i])
                    advance()
            if i >= n:
                raise _err("unterminated string literal", start_line, start_col)
            advance()  # closing quote
            tokens.append(Token("string", "".join(buf), "".join(buf), start_line, start_col))
            continue
        if ch in "0123456789":
            j = i
            while j < n and text[j] in "0123456789":
                j += 1
            is_double = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1] in "0123456789":
                is_double = True
                j += 1
                while j < n and text[j] in "0123456789":
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k] in "0123456789":
                    is_double = True
                    j = k
                    while j < n and text[j] in "0123456789":
                        j += 1
            raw = text[i:j]
            advance(j - i)
            value = float(raw) if is_double else int(raw)
            tokens.append(Token("double" if is_double else "int", raw, value, start_line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            j = i
            # no '-' in identifiers: `a-b` must stay a subtraction
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            raw = text[i:j]
            advance(j - i)
            tokens.append(Token("ident", raw, raw, start_line, start_col))
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                advance(len(sym))
                tokens.append(Token("sym", sym, sym, start_line, start_col))
                break
        else:
            raise _err(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", None, line, col))
    return tokens


@dataclass
class Statement:
    name: str
    expr: Expr
    line: int
    col: int


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.cur
        self.pos += 1
        return tok

    def expect_sym(self, sym) -> Token:
        tok = self.cur
        if tok.kind != "sym" or tok.text != sym:
            raise _err(f"expected {sym!r}, found {tok.text or '<end of input>'!r}", tok.line, tok.col)
        return self.take()

    def parse_statements(self) -> list[Statement]:
        statements = []
        while self.cur.kind != "eof":
            tok = self.cur
            if tok.kind != "ident":
                raise _err(f"expected attribute name, found {tok.text!r}", tok.line, tok.col)
            name = self.take().text
            self.expect_sym("=")
            expr = self.parse_expr()
            self.expect_sym(";")
            statements.append(Statement(name, expr, tok.line, tok.col))
        return statements

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def parse_or(self) -> Expr:
        node = self.parse_and()
        while self.cur.kind == "sym" and self.cur.text == "||":
            self.take()
            node = Binary("||", node, self.parse_and())
        return node

    def parse_and(self) -> Expr:
        node = self.parse_comparison()
        while self.cur.kind == "sym" and self.cur.text == "&&":
            self.take()
            node = Binary("&&", node, self.parse_comparison())
        return node

    def parse_comparison(self) -> Expr:
        node = self.parse_additive()
        while self.cur.kind == "sym" and self.cur.text in ("==", "!=", "<", "<=", ">", ">="):
            op = self.take().text
            node = Binary(op, node, self.parse_additive())
        return node

    def parse_additive(self) -> Expr:
        node = self.parse_multiplicative()
        while self.cur.kind == "sym" and self.cur.text in ("+", "-"):
            op = self.take().text
            node = Binary(op, node, self.parse_multiplicative())
        return node

    def parse_multiplicative(self) -> Expr:
        node = self.parse_unary()
        while self.cur.kind == "sym" and self.cur.text in ("*", "/"):
            op = self.take().text
            node = Binary(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expr:
        if self.cur.kind == "sym" and self.cur.text in ("!", "-"):
            op = self.take().text
            return Unary(op, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.cur
        if tok.kind == "string":
            self.take()
            return Literal(tok.value)
        if tok.kind in ("int", "double"):
            self.take()
            return Literal(tok.value)
        if tok.kind == "sym" and tok.text == "(":
            self.take()
            node = self.parse_expr()
            self.expect_sym(")")
            return node
        if tok.kind == "sym" and tok.text == "{":
            self.take()
            items = []
            if not (self.cur.kind == "sym" and self.cur.text == "}"):
                items.append(self.parse_expr())
                while self.cur.kind == "sym" and self.cur.text == ",":
                    self.take()
                    items.append(self.parse_expr())
            self.expect_sym("}")
            return ListExpr(tuple(items))
        if tok.kind == "ident":
            return self.parse_name()
        raise _err(f"expected expression, found {tok.text or '<end of input>'!r}", tok.line, tok.col)

    def parse_name(self) -> Expr:
        tok = self.take()
        low = tok.text.lower()
        if low in _KEYWORDS:
            return Literal(_KEYWORDS[low])
        if low == "member" and self.cur.kind == "sym" and self.cur.text == "(":
            self.take()
            value = self.parse_expr()
            self.expect_sym(",")
            items = self.parse_expr()
            self.expect_sym(")")
            return MemberCall(value, items)
        if low in ("other", "self") and self.cur.kind == "sym" and self.cur.text == ".":
            self.take()
            attr = self.cur
            if attr.kind != "ident":
                raise _err(f"expected attribute after {tok.text!r}.", attr.line, attr.col)
            self.take()
            return AttrRef(low, attr.text)
        if self.cur.kind == "sym" and self.cur.text == "(":
            raise _err(f"unknown function {tok.text!r}", tok.line, tok.col)
        # bare identifier: reference into the document's own attributes
        return AttrRef("self", tok.text)


def parse_statements(text: str) -> list[Statement]:
    statements = _Parser(tokenize(text)).parse_statements()
    seen = set()
    for stmt in statements:
        low = stmt.name.lower()
        if low in seen:
            raise DuplicateAttribute(
                f"line {stmt.line}, column {stmt.col}: attribute {stmt.name!r} assigned twice"
            )
        seen.add(low)
    return statements
