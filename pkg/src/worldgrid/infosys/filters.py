"""Search filters over directory entries, plus the prefix text syntax.

Text form mirrors the usual parenthesised prefix notation:

    (&(objectClass=GlueCE)(FreeCPUs>=1))
    (|(LRMSType=PBS)(LRMSType=LSF))
    (!(AuthorizedVOs=datatag))
    (RunTimeEnvironment=*)

`objectClass` is matched against an entry's declared classes; all other
names hit attributes. `>=` / `<=` apply to integer-typed attributes only.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import FilterSyntaxError
from .model import INTEGER, DirectoryEntry, Schema

_OBJECTCLASS = "objectclass"


class QueryFilter:
    def matches(self, entry: DirectoryEntry, schema: Schema | None = None) -> bool:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_text()


@dataclass
class Equality(QueryFilter):
    attribute: str
    value: str

    def matches(self, entry, schema=None):
        if self.attribute.lower() == _OBJECTCLASS:
            return entry.has_class(self.value)
        values = entry.attr(self.attribute)
        return values is not None and self.value in values

    def to_text(self):
        return f"({self.attribute}={self.value})"


@dataclass
class Presence(QueryFilter):
    attribute: str

    def matches(self, entry, schema=None):
        if self.attribute.lower() == _OBJECTCLASS:
            return bool(entry.object_classes)
        return entry.attr(self.attribute) is not None

    def to_text(self):
        return f"({self.attribute}=*)"


@dataclass
class ObjectClassIs(QueryFilter):
    name: str

    def matches(self, entry, schema=None):
        return entry.has_class(self.name)

    def to_text(self):
        return f"(objectClass={self.name})"


@dataclass
class Cmp(QueryFilter):
    """Numeric >= / <= ; only meaningful on integer-typed attributes."""

    attribute: str
    op: str  # ">=" or "<="
    value: int

    def matches(self, entry, schema=None):
        if schema is not None and schema.attribute_type(self.attribute) != INTEGER:
            return False
        values = entry.attr(self.attribute)
        if not values:
            return False
        for v in values:
            try:
                n = int(v)
            except ValueError:
                continue
            if (self.op == ">=" and n >= self.value) or (self.op == "<=" and n <= self.value):
                return True
        return False

    def to_text(self):
        return f"({self.attribute}{self.op}{self.value})"


@dataclass
class And(QueryFilter):
    children: list

    def __post_init__(self):
        if not self.children:
            raise ValueError("And requires at least one child")

    def matches(self, entry, schema=None):
        return all(c.matches(entry, schema) for c in self.children)

    def to_text(self):
        return "(&" + "".join(c.to_text() for c in self.children) + ")"


@dataclass
class Or(QueryFilter):
    children: list

    def __post_init__(self):
        if not self.children:
            raise ValueError("Or requires at least one child")

    def matches(self, entry, schema=None):
        return any(c.matches(entry, schema) for c in self.children)

    def to_text(self):
        return "(|" + "".join(c.to_text() for c in self.children) + ")"


@dataclass
class Not(QueryFilter):
    child: QueryFilter

    def matches(self, entry, schema=None):
        return not self.child.matches(entry, schema)

    def to_text(self):
        return "(!" + self.child.to_text() + ")"


class MatchAll(QueryFilter):
    def matches(self, entry, schema=None):
        return True

    def to_text(self):
        return "(objectClass=*)"


def parse_filter(text: str) -> QueryFilter:
    """Parse the prefix filter syntax; raises FilterSyntaxError on bad input."""
    parser = _FilterParser(text)
    node = parser.parse_node()
    parser.skip_ws()
    if not parser.at_end():
        raise FilterSyntaxError(f"trailing input at offset {parser.pos}: {text!r}")
    return node


class _FilterParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def at_end(self):
        return self.pos >= len(self.text)

    def skip_ws(self):
        while not self.at_end() and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch):
        if self.at_end() or self.text[self.pos] != ch:
            raise FilterSyntaxError(f"expected {ch!r} at offset {self.pos} in {self.text!r}")
        self.pos += 1

    def parse_node(self) -> QueryFilter:
        self.skip_ws()
        self.expect("(")
        self.skip_ws()
        if self.at_end():
            raise FilterSyntaxError(f"unterminated filter: {self.text!r}")
        ch = self.text[self.pos]
        if ch in "&|":
            self.pos += 1
            children = []
            self.skip_ws()
            while not self.at_end() and self.text[self.pos] == "(":
                children.append(self.parse_node())
                self.skip_ws()
            self.expect(")")
            if not children:
                raise FilterSyntaxError(f"empty {'and' if ch == '&' else 'or'} at offset {self.pos}")
            return And(children) if ch == "&" else Or(children)
        if ch == "!":
            self.pos += 1
            child = self.parse_node()
            self.skip_ws()
            self.expect(")")
            return Not(child)
        return self._parse_simple()

    def _parse_simple(self) -> QueryFilter:
        start = self.pos
        while not self.at_end() and self.text[self.pos] not in "=<>()":
            self.pos += 1
        attr = self.text[start : self.pos].strip()
        if not attr:
            raise FilterSyntaxError(f"missing attribute name at offset {start} in {self.text!r}")
        if self.at_end():
            raise FilterSyntaxError(f"unterminated filter: {self.text!r}")
        op = self.text[self.pos]
        if op in "<>":
            self.pos += 1
            self.expect("=")
            vstart = self.pos
            while not self.at_end() and self.text[self.pos] != ")":
                self.pos += 1
            raw = self.text[vstart : self.pos].strip()
            self.expect(")")
            try:
                value = int(raw)
            except ValueError:
                raise FilterSyntaxError(f"non-integer comparison value {raw!r}") from None
            return Cmp(attr, op + "=", value)
        self.expect("=")
        vstart = self.pos
        while not self.at_end() and self.text[self.pos] != ")":
            self.pos += 1
        value = self.text[vstart : self.pos].strip()
        self.expect(")")
        if value == "*":
            return Presence(attr)
        if not value:
            raise FilterSyntaxError(f"empty value for attribute {attr!r}")
        if attr.lower() == _OBJECTCLASS:
            return ObjectClassIs(value)
        return Equality(attr, value)
