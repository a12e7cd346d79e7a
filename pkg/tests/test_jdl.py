import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from worldgrid import errors
from worldgrid.jdl import (
    AttrRef,
    Binary,
    EvalEnv,
    JdlDocument,
    ListExpr,
    Literal,
    MemberCall,
    UNDEFINED,
    Unary,
    evaluate,
    parse,
    requirements_satisfied,
    serialize,
)

T, F, U = True, False, UNDEFINED


def ev(expr, other=None, self_attrs=None):
    return evaluate(expr, EvalEnv(other=other or {}, self_attrs=self_attrs or {}))


ATLAS_JOB = """
# synthetic detector-response job
Executable = "sim.sh";
Arguments = "--events 100";
StdOutput = "out.log";
StdError = "err.log";
InputSandbox = {"sim.sh", "geometry.dat"};
OutputSandbox = {"out.log", "err.log"};
VirtualOrganisation = "datatag";
Requirements = Member("ATLAS", other.RunTimeEnvironment);
Rank = other.FreeCPUs;
"""


class TestParse:
    def test_member_requirement_parses_to_call_node(self):
        doc = parse(ATLAS_JOB)
        assert doc.executable == "sim.sh"
        assert doc.input_sandbox == ["sim.sh", "geometry.dat"]
        assert doc.virtual_organisation == "datatag"
        assert isinstance(doc.requirements, MemberCall)
        assert doc.requirements.value == Literal("ATLAS")
        assert doc.requirements.items == AttrRef("other", "RunTimeEnvironment")
        assert doc.rank == AttrRef("other", "FreeCPUs")

    def test_empty_input_rejected(self):
        with pytest.raises(errors.JdlSyntaxError):
            parse("")

    def test_requirements_default_true(self):
        doc = parse('Executable = "a.sh";')
        assert doc.requirements == Literal(True)
        assert doc.rank is None

    def test_duplicate_attribute(self):
        with pytest.raises(errors.DuplicateAttribute):
            parse('Executable = "a"; executable = "b";')

    def test_syntax_error_carries_position(self):
        with pytest.raises(errors.JdlSyntaxError) as exc:
            parse('Executable = "a.sh";\nRank = * 3;')
        assert "line 2" in str(exc.value)

    def test_precedence(self):
        doc = parse('Executable = "x"; Requirements = 1 + 2 * 3 == 7 && !false;')
        r = doc.requirements
        assert r == Binary(
            "&&",
            Binary("==", Binary("+", Literal(1), Binary("*", Literal(2), Literal(3))), Literal(7)),
            Unary("!", Literal(False)),
        )
        assert ev(r) is True

    def test_bare_identifier_is_self_scope(self):
        doc = parse('Executable = "x"; CpuNeed = 4; Requirements = CpuNeed > 2;')
        assert doc.requirements == Binary(">", AttrRef("self", "CpuNeed"), Literal(2))
        assert requirements_satisfied(doc, {})

    def test_subtraction_without_spaces(self):
        doc = parse('Executable = "x"; Rank = other.FreeCPUs-1;')
        assert doc.rank == Binary("-", AttrRef("other", "FreeCPUs"), Literal(1))
        assert evaluate(doc.rank, EvalEnv(other={"FreeCPUs": 4})) == 3


class TestEvaluate:
    def test_member_examples(self):
        assert ev(MemberCall(Literal("ATLAS"), Literal(["ATLAS", "CMS"]))) is True
        assert ev(MemberCall(Literal("LHCB"), Literal(["ATLAS", "CMS"]))) is False
        assert ev(MemberCall(Literal("ATLAS"), AttrRef("other", "RunTimeEnvironment"))) is UNDEFINED

    def test_absent_attribute_folds_to_undefined(self):
        gt = Binary(">", AttrRef("other", "FreeCPUs"), Literal(0))
        assert ev(gt) is UNDEFINED
        assert ev(Binary("&&", Literal(False), gt)) is False
        assert ev(Binary("||", Literal(True), gt)) is True

    def test_division_by_zero(self):
        assert ev(Binary("/", Literal(4), Literal(0))) is UNDEFINED
        assert ev(Binary("/", Literal(4.0), Literal(0.0))) is UNDEFINED
        assert ev(Binary("/", Literal(9), Literal(2))) == 4.5

    def test_kleene_truth_tables(self):
        domain = [T, F, U]
        and_table = {
            (T, T): T, (T, F): F, (T, U): U,
            (F, T): F, (F, F): F, (F, U): F,
            (U, T): U, (U, F): F, (U, U): U,
        }
        or_table = {
            (T, T): T, (T, F): T, (T, U): T,
            (F, T): T, (F, F): F, (F, U): U,
            (U, T): T, (U, F): U, (U, U): U,
        }
        for a, b in itertools.product(domain, repeat=2):
            got_and = ev(Binary("&&", Literal(a), Literal(b)))
            got_or = ev(Binary("||", Literal(a), Literal(b)))
            assert got_and is and_table[(a, b)], f"{a} && {b}"
            assert got_or is or_table[(a, b)], f"{a} || {b}"
        for a in domain:
            expected = U if a is U else (not a)
            assert ev(Unary("!", Literal(a))) is expected

    def test_type_mismatches_fold_to_undefined(self):
        assert ev(Binary("==", Literal("4"), Literal(4))) is UNDEFINED
        assert ev(Binary("<", Literal(True), Literal(1))) is UNDEFINED
        assert ev(Binary("+", Literal("a"), Literal("b"))) is UNDEFINED
        assert ev(Unary("-", Literal("a"))) is UNDEFINED

    def test_case_insensitive_attribute_lookup(self):
        assert ev(AttrRef("other", "freecpus"), other={"FreeCPUs": 3}) == 3


class TestRequirements:
    def test_true_matches_everything(self):
        doc = parse('Executable = "x";')
        assert requirements_satisfied(doc, {})
        assert requirements_satisfied(doc, {"FreeCPUs": 0})

    def test_tag_requirement(self):
        doc = parse(ATLAS_JOB)
        assert requirements_satisfied(doc, {"RunTimeEnvironment": ["ATLAS", "CMS"]})
        assert not requirements_satisfied(doc, {"RunTimeEnvironment": ["CMS"]})

    def test_undefined_is_not_satisfied(self):
        doc = parse(ATLAS_JOB)
        assert not requirements_satisfied(doc, {})


# -- canonical form round trip ------------------------------------------------

def random_expr(rng, depth=0):
    # negative numbers stay Unary nodes: parse never folds "-3" into a literal
    leaf_pool = [
        lambda: Literal(rng.randint(0, 9)),
        lambda: Literal(rng.choice([0.5, 2.0, 3.25])),
        lambda: Literal(rng.choice(["ATLAS", "CMS", "", 'quo"te', "a\\b"])),
        lambda: Literal(rng.random() < 0.5),
        lambda: Literal(UNDEFINED),
        lambda: AttrRef(rng.choice(["other", "self"]), rng.choice(["FreeCPUs", "Tag", "X"])),
    ]
    if depth >= 4:
        return rng.choice(leaf_pool)()
    roll = rng.random()
    if roll < 0.45:
        return rng.choice(leaf_pool)()
    if roll < 0.60:
        return Unary(rng.choice(["!", "-"]), random_expr(rng, depth + 1))
    if roll < 0.90:
        op = rng.choice(["&&", "||", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/"])
        return Binary(op, random_expr(rng, depth + 1), random_expr(rng, depth + 1))
    if roll < 0.97:
        return MemberCall(
            random_expr(rng, depth + 1),
            ListExpr(tuple(random_expr(rng, depth + 1) for _ in range(rng.randint(0, 3)))),
        )
    return ListExpr(tuple(random_expr(rng, depth + 1) for _ in range(rng.randint(0, 3))))


def test_round_trip_over_generated_corpus():
    rng = random.Random(42)
    for i in range(300):
        doc = JdlDocument(executable="run.sh")
        doc.attributes = {
            "Executable": Literal("run.sh"),
            "Requirements": random_expr(rng),
            "Rank": random_expr(rng),
        }
        text = serialize(doc)
        reparsed = parse(text)
        assert reparsed.attributes == doc.attributes, text
        assert serialize(reparsed) == text


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=80))
def test_parser_totality(text):
    try:
        parse(text)
    except (errors.JdlSyntaxError, errors.DuplicateAttribute):
        pass


# -- dual-implementation oracle -----------------------------------------------
# An independent interpreter written straight from the semantics table; any
# divergence from evaluate() is a bug in one of the two.

def oracle_eval(expr, other, self_attrs):
    def lookup(scope, name):
        table = other if scope == "other" else self_attrs
        for k, v in table.items():
            if k.lower() == name.lower():
                return v
        return U

    def num(x):
        return isinstance(x, (int, float)) and not isinstance(x, bool)

    def kind(x):
        if isinstance(x, bool):
            return "b"
        if num(x):
            return "n"
        if isinstance(x, str):
            return "s"
        if isinstance(x, list):
            return "l"
        return "?"

    def eq3(a, b):
        if a is U or b is U:
            return U
        ka, kb = kind(a), kind(b)
        if ka != kb or ka in ("?", "l"):
            return U
        return (a is b) if ka == "b" else (a == b)

    e = expr
    if isinstance(e, Literal):
        return e.value
    if isinstance(e, ListExpr):
        return [oracle_eval(i, other, self_attrs) for i in e.items]
    if isinstance(e, AttrRef):
        return lookup(e.scope, e.name)
    if isinstance(e, Unary):
        v = oracle_eval(e.operand, other, self_attrs)
        if e.op == "!":
            return (not v) if isinstance(v, bool) else U
        return -v if num(v) else U
    if isinstance(e, MemberCall):
        v = oracle_eval(e.value, other, self_attrs)
        xs = oracle_eval(e.items, other, self_attrs)
        if v is U or not isinstance(xs, list):
            return U
        return any(eq3(v, x) is True for x in xs)
    a = oracle_eval(e.left, other, self_attrs)
    b = oracle_eval(e.right, other, self_attrs)
    ta = a if isinstance(a, bool) else U
    tb = b if isinstance(b, bool) else U
    if e.op == "&&":
        return False if (ta is False or tb is False) else (U if (ta is U or tb is U) else True)
    if e.op == "||":
        return True if (ta is True or tb is True) else (U if (ta is U or tb is U) else False)
    if e.op == "==":
        return eq3(a, b)
    if e.op == "!=":
        r = eq3(a, b)
        return U if r is U else not r
    if e.op in ("<", "<=", ">", ">="):
        if num(a) and num(b) or (isinstance(a, str) and isinstance(b, str)):
            return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[e.op]
        return U
    if not (num(a) and num(b)):
        return U
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return U if b == 0 else a / b


def test_evaluator_agrees_with_independent_interpreter():
    rng = random.Random(1337)
    envs = [
        ({}, {}),
        ({"FreeCPUs": 4, "Tag": "ATLAS"}, {"X": 2}),
        ({"FreeCPUs": 0.0, "Tag": ["ATLAS", "CMS"]}, {"X": "CMS"}),
        ({"Tag": [True, 3, "zz"]}, {"X": False}),
    ]
    for i in range(2000):
        expr = random_expr(rng, depth=rng.randint(0, 2))
        other, self_attrs = envs[i % len(envs)]
        got = ev(expr, other=other, self_attrs=self_attrs)
        want = oracle_eval(expr, other, self_attrs)
        if got is U or want is U:
            assert got is want, f"{expr} -> {got!r} vs oracle {want!r}"
        else:
            assert got == want and type(got) is type(want), f"{expr} -> {got!r} vs {want!r}"
