"""Expression tree and three-valued evaluation.

Evaluation is total: any failure (absent attribute, type mismatch, division
by zero) folds to Undefined instead of raising. Boolean operators follow the
Kleene tables with the usual dominance rules: `false && x` is false and
`true || x` is true no matter what x evaluates to.

Semantics, by node:
  AttrRef        absent name -> Undefined (names compare case-insensitively)
  !x             bool -> negation, else Undefined
  -x             number -> negation, else Undefined
  x && y, x || y Kleene over {true, false, Undefined}; non-bool folds to Undefined
  == !=          numbers numerically, strings/bools exactly; mixed types -> Undefined
  <  <= >  >=    numbers numerically, strings lexicographically; else Undefined
  +  -  *        numbers only; int stays int
  /              numbers only, true division; zero divisor -> Undefined
  Member(v, xs)  true iff some element of xs equals v; false when xs is a
                 defined list without v; Undefined when xs is not a list or
                 v is Undefined
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "undefined"

    def __bool__(self):
        return False


UNDEFINED = _Undefined()

Value = Union[bool, int, float, str, list, _Undefined]

COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")
ARITHMETIC = ("+", "-", "*", "/")
LOGICAL = ("&&", "||")


class Expr:
    pass


@dataclass(frozen=True)
class Literal(Expr):
    value: object

    def __post_init__(self):
        if isinstance(self.value, tuple):
            object.__setattr__(self, "value", list(self.value))


@dataclass(frozen=True)
class ListExpr(Expr):
    items: tuple


@dataclass(frozen=True)
class AttrRef(Expr):
    scope: str  # "other" or "self"
    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "!" or "-"
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class MemberCall(Expr):
    """Member(value, list) -- list membership with tri-state result."""

    value: Expr
    items: Expr


@dataclass
class EvalEnv:
    """Attribute maps for the two reference scopes."""

    other: dict = field(default_factory=dict)
    self_attrs: dict = field(default_factory=dict)

    def lookup(self, scope: str, name: str) -> Value:
        table = self.other if scope == "other" else self.self_attrs
        low = name.lower()
        for key, value in table.items():
            if key.lower() == low:
                return value
        return UNDEFINED


def is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _tri(v):
    """Fold an arbitrary value into the Kleene domain {True, False, UNDEFINED}."""
    return v if isinstance(v, bool) else UNDEFINED


def kleene_and(a, b):
    a, b = _tri(a), _tri(b)
    if a is False or b is False:
        return False
    if a is UNDEFINED or b is UNDEFINED:
        return UNDEFINED
    return True


def kleene_or(a, b):
    a, b = _tri(a), _tri(b)
    if a is True or b is True:
        return True
    if a is UNDEFINED or b is UNDEFINED:
        return UNDEFINED
    return False


def kleene_not(a):
    a = _tri(a)
    return UNDEFINED if a is UNDEFINED else not a


def scalar_eq(a, b):
    """Equality in the value domain; mismatched types yield UNDEFINED."""
    if a is UNDEFINED or b is UNDEFINED:
        return UNDEFINED
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b if isinstance(a, bool) and isinstance(b, bool) else UNDEFINED
    if is_number(a) and is_number(b):
        return float(a) == float(b)
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return UNDEFINED


def _order(op, a, b):
    if a is UNDEFINED or b is UNDEFINED:
        return UNDEFINED
    if is_number(a) and is_number(b):
        pass
    elif isinstance(a, str) and isinstance(b, str):
        pass
    else:
        return UNDEFINED
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def _arith(op, a, b):
    if not (is_number(a) and is_number(b)):
        return UNDEFINED
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        return UNDEFINED
    return a / b


def evaluate(expr: Expr, env: EvalEnv) -> Value:
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, ListExpr):
        return [evaluate(item, env) for item in expr.items]
    if isinstance(expr, AttrRef):
        return env.lookup(expr.scope, expr.name)
    if isinstance(expr, Unary):
        v = evaluate(expr.operand, env)
        if expr.op == "!":
            return kleene_not(v)
        return -v if is_number(v) else UNDEFINED
    if isinstance(expr, Binary):
        left = evaluate(expr.left, env)
        if expr.op == "&&":
            if _tri(left) is False:
                return False
            return kleene_and(left, evaluate(expr.right, env))
        if expr.op == "||":
            if _tri(left) is True:
                return True
            return kleene_or(left, evaluate(expr.right, env))
        right = evaluate(expr.right, env)
        if expr.op == "==":
            return scalar_eq(left, right)
        if expr.op == "!=":
            eq = scalar_eq(left, right)
            return eq if eq is UNDEFINED else not eq
        if expr.op in ("<", "<=", ">", ">="):
            return _order(expr.op, left, right)
        return _arith(expr.op, left, right)
    if isinstance(expr, MemberCall):
        value = evaluate(expr.value, env)
        items = evaluate(expr.items, env)
        if value is UNDEFINED or not isinstance(items, list):
            return UNDEFINED
        return any(scalar_eq(value, item) is True for item in items)
    raise TypeError(f"unknown expression node {expr!r}")
