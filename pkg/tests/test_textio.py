import pytest
from hypothesis import given, settings, strategies as st

from verbalg.closure import EquationSystem
from verbalg.finite import variety_violation
from verbalg.freeforms import builtin_spec
from verbalg.signature import Signature
from verbalg.terms import App, Var
from verbalg.textio import (
    ParseError,
    format_algebra,
    format_system,
    format_variety,
    format_words,
    parse_algebra,
    parse_query,
    parse_system,
    parse_term,
    parse_variety,
    parse_words,
)

from conftest import ACT_CORPUS, fixture_text, load_algebra, load_variety
from strategies import algebras, terms

TWO = Signature.build(["1", "2"], {"mul": (("1", "1"), "1"), "act": (("1", "2"), "2"), "c": ((), "1")})
ALPHA = {"x1": "1", "x2": "1", "y1": "2"}


@pytest.mark.parametrize("vid", ["act", "automaton"])
def test_builtin_variety_round_trip(vid):
    v = builtin_spec(vid)
    again = parse_variety(format_variety(v))
    assert again.signature == v.signature
    assert [str(i) for i in again.identities] == [str(i) for i in v.identities]


@pytest.mark.parametrize("name", ["semigroup.var", "bi_unary.var", "z3set.var"])
def test_fixture_variety_round_trip(name):
    v = parse_variety(fixture_text(name))
    assert parse_variety(format_variety(v)) == v


@pytest.mark.parametrize("name", ACT_CORPUS + ["act_free_y.alg"])
def test_algebra_fixture_round_trip(name):
    H = load_algebra(name, "act")
    assert parse_algebra(format_algebra(H), load_variety("act")) == H


@settings(max_examples=60, deadline=None)
@given(algebras(TWO, 3, min_size=0))
def test_algebra_round_trip_property(H):
    assert parse_algebra(format_algebra(H), TWO) == H


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["1", "2"]).flatmap(lambda s: terms(TWO, ALPHA, s, 3)))
def test_term_round_trip_property(t):
    assert parse_term(str(t), TWO, ALPHA) == t


def test_system_round_trip():
    sig = load_variety("act").signature
    T = parse_system(fixture_text("act_system.eq"), sig)
    assert T.variables == ALPHA
    assert parse_system(format_system(T), sig) == T
    empty = EquationSystem.of({"x1": "1"})
    assert parse_system(format_system(empty), sig) == empty


def test_words_round_trip():
    sig = load_variety("act").signature
    W = parse_words(fixture_text("act_opposite.words"), sig)
    assert parse_words(format_words(W), sig) == W


def test_query_sorts_checked():
    sig = load_variety("act").signature
    lhs, rhs = parse_query("mul(x1,x2) = x2", sig, ALPHA)
    assert lhs == App("mul", (Var("x1", "1"), Var("x2", "1")), "1") and rhs == Var("x2", "1")
    with pytest.raises(ParseError, match="sorts"):
        parse_query("x1 = y1", sig, ALPHA)


def position(fn, *args):
    with pytest.raises(ParseError) as info:
        fn(*args)
    return info.value


def test_misspelled_operation_position():
    text = "variety v\nsorts 1\nop mul : 1 1 -> 1\nidentity [x:1] mull(x,x) = x\n"
    err = position(parse_variety, text)
    assert (err.line, err.column) == (4, 16)
    assert "mul" in err.expected


def test_empty_file():
    err = position(parse_variety, "")
    assert "no sorts declared" in err.message
    assert err.expected == ("sorts",)


def test_unknown_keyword_and_sort():
    err = position(parse_variety, "sorts 1\nopp f : 1 -> 1\n")
    assert (err.line, err.column) == (2, 1)
    err = position(parse_variety, "sorts 1\nop f : 1 -> 2\n")
    assert err.line == 2 and "undeclared sort" in err.message


def test_missing_row():
    sig = load_variety("act").signature
    text = fixture_text("act_z2.alg").replace("  t q -> p\n", "")
    err = position(parse_algebra, text, sig)
    assert "no row for (t q)" in err.message
    assert err.line == 4


def test_missing_table():
    sig = load_variety("act").signature
    text = fixture_text("act_z2.alg").split("table mul")[0]
    err = position(parse_algebra, text, sig)
    assert "missing table" in err.message and err.expected == ("table",)


def test_bad_element_and_character():
    sig = load_variety("act").signature
    err = position(parse_algebra, fixture_text("act_z2.alg").replace("t p -> q", "t p -> z"), sig)
    assert "'z' is not an element" in err.message
    err = position(parse_term, "mul(x1 @ x2)", sig, ALPHA)
    assert err.column == 8


def test_parsing_does_not_check_identities():
    v = load_variety("semigroup.var")
    H = parse_algebra("carrier 1 : a b\ntable mul\n a a -> b\n a b -> a\n b a -> a\n b b -> a\n", v)
    assert variety_violation(H, v) is not None


def test_empty_carrier_needs_no_rows():
    H = load_algebra("act_empty2.alg", "act")
    assert H.size("2") == 0
    assert parse_algebra(format_algebra(H), load_variety("act")) == H


def test_words_sort_mismatch():
    sig = load_variety("act").signature
    err = position(parse_words, "act := x1\nmul := x2\n", sig)
    assert err.line == 1 and "expected '2'" in err.message
