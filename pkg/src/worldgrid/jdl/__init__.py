"""Job description language: parser, tri-state evaluator, canonical form."""

from .document import JdlDocument, format_expr, parse, requirements_satisfied, serialize
from .expr import (
    AttrRef,
    Binary,
    EvalEnv,
    Expr,
    ListExpr,
    Literal,
    MemberCall,
    UNDEFINED,
    Unary,
    evaluate,
    is_number,
    kleene_and,
    kleene_not,
    kleene_or,
    scalar_eq,
)
from .parser import parse_statements, tokenize

__all__ = [
    "JdlDocument", "format_expr", "parse", "requirements_satisfied", "serialize",
    "AttrRef", "Binary", "EvalEnv", "Expr", "ListExpr", "Literal", "MemberCall",
    "UNDEFINED", "Unary", "evaluate", "is_number",
    "kleene_and", "kleene_not", "kleene_or", "scalar_eq",
    "parse_statements", "tokenize",
]
