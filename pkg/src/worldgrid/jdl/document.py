"""Job description documents: typed fields over the raw attribute list."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import JdlSyntaxError
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
)
from .parser import parse_statements


@dataclass
class JdlDocument:
    executable: str
    arguments: str = ""
    stdout: str = ""
    stderr: str = ""
    input_sandbox: list[str] = field(default_factory=list)
    output_sandbox: list[str] = field(default_factory=list)
    input_data: list[str] = field(default_factory=list)
    virtual_organisation: str = ""
    requirements: Expr = Literal(True)
    rank: Expr | None = None
    # every attribute as written, canonical-name -> expression
    attributes: dict[str, Expr] = field(default_factory=dict)

    def self_env(self) -> dict:
        """Literal-valued attributes, visible to `self.X` references."""
        env = {}
        for name, expr in self.attributes.items():
            value = _static_value(expr)
            if value is not None:
                env[name] = value
        return env

    def eval_env(self, ce_attributes: dict) -> EvalEnv:
        return EvalEnv(other=dict(ce_attributes), self_attrs=self.self_env())


def _static_value(expr: Expr):
    if isinstance(expr, Literal) and expr.value is not UNDEFINED:
        return expr.value
    if isinstance(expr, ListExpr):
        items = [_static_value(i) for i in expr.items]
        if all(v is not None for v in items):
            return items
    return None


def _want_string(name, expr, stmt):
    if isinstance(expr, Literal) and isinstance(expr.value, str):
        return expr.value
    raise JdlSyntaxError(f"line {stmt.line}, column {stmt.col}: {name} must be a string")


def _want_string_list(name, expr, stmt):
    if isinstance(expr, Literal) and isinstance(expr.value, str):
        return [expr.value]
    if isinstance(expr, ListExpr):
        out = []
        for item in expr.items:
            if not (isinstance(item, Literal) and isinstance(item.value, str)):
                raise JdlSyntaxError(
                    f"line {stmt.line}, column {stmt.col}: {name} must list strings"
                )
            out.append(item.value)
        return out
    raise JdlSyntaxError(f"line {stmt.line}, column {stmt.col}: {name} must be a string list")


def parse(text: str) -> JdlDocument:
    """Parse job description text; executable is mandatory."""
    statements = parse_statements(text)
    by_name = {}
    attributes = {}
    for stmt in statements:
        by_name[stmt.name.lower()] = stmt
        attributes[stmt.name] = stmt.expr

    def stmt_of(key):
        return by_name.get(key)

    exe_stmt = stmt_of("executable")
    if exe_stmt is None:
        raise JdlSyntaxError("line 1, column 1: Executable attribute is required")
    executable = _want_string("Executable", exe_stmt.expr, exe_stmt)
    if not executable:
        raise JdlSyntaxError(
            f"line {exe_stmt.line}, column {exe_stmt.col}: Executable must be non-empty"
        )

    doc = JdlDocument(executable=executable, attributes=attributes)
    simple_strings = {
        "arguments": "arguments",
        "stdoutput": "stdout",
        "stderror": "stderr",
        "virtualorganisation": "virtual_organisation",
    }
    for key, attr in simple_strings.items():
        stmt = stmt_of(key)
        if stmt is not None:
            setattr(doc, attr, _want_string(stmt.name, stmt.expr, stmt))
    string_lists = {
        "inputsandbox": "input_sandbox",
        "outputsandbox": "output_sandbox",
        "inputdata": "input_data",
    }
    for key, attr in string_lists.items():
        stmt = stmt_of(key)
        if stmt is not None:
            setattr(doc, attr, _want_string_list(stmt.name, stmt.expr, stmt))
    req = stmt_of("requirements")
    doc.requirements = req.expr if req is not None else Literal(True)
    if req is None:
        attributes["Requirements"] = doc.requirements
    rank = stmt_of("rank")
    doc.rank = rank.expr if rank is not None else None
    return doc


def requirements_satisfied(doc: JdlDocument, ce_attributes: dict) -> bool:
    """True only when requirements evaluate to exactly true (not Undefined)."""
    return evaluate(doc.requirements, doc.eval_env(ce_attributes)) is True


# -- canonical serialization -------------------------------------------------

def _quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Literal):
        v = expr.value
        if v is UNDEFINED:
            return "undefined"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return _quote(v)
        if isinstance(v, float):
            return repr(v)
        return str(v)
    if isinstance(expr, ListExpr):
        return "{" + ", ".join(format_expr(i) for i in expr.items) + "}"
    if isinstance(expr, AttrRef):
        return f"{expr.scope}.{expr.name}"
    if isinstance(expr, Unary):
        return f"{expr.op}({format_expr(expr.operand)})"
    if isinstance(expr, Binary):
        return f"({format_expr(expr.left)} {expr.op} {format_expr(expr.right)})"
    if isinstance(expr, MemberCall):
        return f"Member({format_expr(expr.value)}, {format_expr(expr.items)})"
    raise TypeError(f"unknown expression node {expr!r}")


def serialize(doc: JdlDocument) -> str:
    """Canonical text: attributes sorted by name, one per line."""
    lines = []
    for name in sorted(doc.attributes, key=str.lower):
        lines.append(f"{name} = {format_expr(doc.attributes[name])};")
    return "\n".join(lines) + "\n"
