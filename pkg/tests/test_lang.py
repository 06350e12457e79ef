import random

import pytest
from hypothesis import given, strategies as st

from spldp import lang
from spldp.generate import random_program

from conftest import GCD


def test_parse_gcd_structure():
    p = lang.parse(GCD)
    assert isinstance(p, lang.While)
    body = p.body
    assert isinstance(body, lang.If)
    assert isinstance(body.then, lang.Seq) and isinstance(body.then.second, lang.Break)
    assert isinstance(body.else_, lang.Seq) and isinstance(body.else_.second, lang.Continue)
    assert body.then.first == lang.Assign("x", lang.BinOp("-", lang.Var("x"), lang.Var("y")))


def test_precedence_and_associativity():
    e = lang.parse_expr("a - b - c * d")
    assert e == lang.BinOp("-", lang.BinOp("-", lang.Var("a"), lang.Var("b")),
                           lang.BinOp("*", lang.Var("c"), lang.Var("d")))
    assert lang.format_expr(lang.parse_expr("a - (b - c)")) == "a - (b - c)"
    assert lang.format_expr(lang.parse_expr("(a * b) + c")) == "a * b + c"


def test_conditions():
    c = lang.parse_cond("x < 1 and not y == 2 or ?")
    assert isinstance(c, lang.BoolOp)
    assert lang.variables(c) == {"x", "y"}
    assert isinstance(lang.parse_cond("?"), lang.Nondet)


@pytest.mark.parametrize("src,neg", [("x < 1", "x >= 1"), ("a == b", "a != b"), ("true", "false")])
def test_negate_comparisons(src, neg):
    assert lang.negate(lang.parse_cond(src)) == lang.parse_cond(neg)


def test_negate_twice_is_identity_for_nondet():
    c = lang.Nondet()
    assert lang.negate(lang.negate(c)) == c


def test_optional_else_and_skip():
    p = lang.parse("if c { skip }")
    assert p == lang.If(lang.Var("c"), lang.Skip(), lang.Skip())


@pytest.mark.parametrize("src,line,col", [
    ("x = ", 1, 5),
    ("while c {", 1, 9),
    ("x = 1;\n  y = $", 2, 7),
    ("if x { skip } else", 1, 19),
])
def test_syntax_errors_carry_positions(src, line, col):
    with pytest.raises(lang.SplSyntaxError) as info:
        lang.parse(src)
    assert (info.value.line, info.value.col) == (line, col)


def test_unclosed_brace_mentions_opening():
    with pytest.raises(lang.SplSyntaxError, match="opened at 1:6"):
        lang.parse("if c { skip")


def test_type_errors():
    with pytest.raises(lang.SplSyntaxError):
        lang.parse("x = a < b")


def test_check_closed():
    assert lang.check_closed(lang.parse(GCD)) == []
    bad = lang.check_closed(lang.parse("while c { break }; continue"))
    assert [v.kind for v in bad] == ["continue"]
    assert "outside of any while loop" in str(bad[0])


def test_program_variables_and_size():
    p = lang.parse(GCD)
    assert lang.program_variables(p) == {"x", "y"}
    assert lang.size(p) == 8


def test_sequence_builds_right_nested():
    stmts = [lang.Skip(), lang.Break(), lang.Continue()]
    s = lang.sequence(stmts)
    assert s == lang.Seq(lang.Skip(), lang.Seq(lang.Break(), lang.Continue()))
    assert lang.sequence([]) == lang.Skip()


@given(st.integers(0, 2 ** 32 - 1))
def test_format_then_parse_round_trips(seed):
    p = random_program(random.Random(seed), 30)
    assert lang.parse(lang.format_stmt(p)) == p


def test_moderate_nesting_parses():
    depth = 120
    p = lang.parse("while c { " * depth + "skip" + " }" * depth)
    assert lang.check_closed(p) == []
    assert lang.size(p) == depth + 1


def test_excessive_nesting_is_a_syntax_error():
    depth = 20000
    with pytest.raises(lang.SplSyntaxError, match="nesting too deep"):
        lang.parse("while c { " * depth + "skip" + " }" * depth)
