import pytest
from hypothesis import given

from verbalg.signature import Signature
from verbalg.terms import (
    App,
    TermError,
    Var,
    check_term,
    enumerate_terms,
    mk_app,
    mk_var,
    substitute,
    vars_of,
)

from strategies import terms

SIG = Signature.build(["1", "2"], {"mul": (("1", "1"), "1"), "act": (("1", "2"), "2"), "c": ((), "1")})


def test_mk_var_value_semantics():
    assert mk_var("x", "1") == mk_var("x", "1")
    assert mk_var("v", "2").sort == "2"


def test_mk_app_sorts(act):
    t = mk_app(act.signature, "act", [Var("g", "1"), Var("v", "2")])
    assert t.sort == "2"


def test_mk_app_reports_position(act):
    with pytest.raises(TermError, match="position 0.*expected '1', got '2'"):
        mk_app(act.signature, "act", [Var("v", "2"), Var("g", "1")])


def test_mk_app_arity(act):
    with pytest.raises(TermError, match="expects 2 arguments"):
        mk_app(act.signature, "mul", [Var("g", "1")])


def test_constant():
    t = mk_app(SIG, "c", [])
    assert t.sort == "1" and str(t) == "c()"


def test_vars_of():
    g, h, v = Var("g", "1"), Var("h", "1"), Var("v", "2")
    assert vars_of(g) == {"g": "1"}
    assert vars_of(App("mul", (g, g), "1")) == {"g": "1"}
    t = App("act", (g, App("act", (h, v), "2")), "2")
    assert vars_of(t) == {"g": "1", "h": "1", "v": "2"}


def test_substitute_examples():
    a, b, c = (Var(n, "1") for n in "abc")
    x1, x2 = Var("x1", "1"), Var("x2", "1")
    s = App("mul", (b, c), "1")
    assert substitute(x1, {"x1": s}) == s
    assert substitute(App("mul", (x1, x2), "1"), {"x1": a, "x2": s}) == App("mul", (a, s), "1")


def test_substitute_errors():
    with pytest.raises(TermError):
        substitute(Var("x", "1"), {})
    with pytest.raises(TermError):
        substitute(Var("x", "1"), {"x": Var("v", "2")})


def test_enumeration_examples(act):
    assert list(enumerate_terms(act.signature, {"x": "1"}, 0)) == [Var("x", "1")]
    out = [str(t) for t in enumerate_terms(act.signature, {"x1": "1", "x2": "1"}, 1)]
    assert out == ["x1", "x2", "mul(x1,x1)", "mul(x1,x2)", "mul(x2,x1)", "mul(x2,x2)"]
    assert list(enumerate_terms(act.signature, {}, 3)) == []


def _count_by_depth(sig, alphabet, d):
    """Independent count: number of terms of each sort with depth <= d by recurrence."""
    counts = {s: sum(1 for x in alphabet.values() if x == s) + sum(
        1 for c in sig.constants if sig.op(c).result == s) for s in sig.sorts}
    for _ in range(d):
        new = {s: sum(1 for x in alphabet.values() if x == s) for s in sig.sorts}
        for name, t in sig.ops:
            prod = 1
            for a in t.args:
                prod *= counts[a]
            new[t.result] += prod
        counts = new
    return sum(counts.values())


@pytest.mark.parametrize("d", [0, 1, 2])
def test_enumeration_count_matches_recurrence(d):
    alphabet = {"x": "1", "v": "2"}
    got = list(enumerate_terms(SIG, alphabet, d))
    assert len(got) == len(set(got)) == _count_by_depth(SIG, alphabet, d)
    assert all(t.depth <= d for t in got)
    assert [t.depth for t in got] == sorted(t.depth for t in got)


ALPHA = {"x": "1", "y": "1", "v": "2"}


@given(terms(SIG, ALPHA, "2", 3))
def test_generated_terms_are_sort_sound(t):
    check_term(SIG, t, ALPHA)


@given(terms(SIG, ALPHA, "2", 3), terms(SIG, ALPHA, "1", 2), terms(SIG, ALPHA, "1", 2),
       terms(SIG, {"x": "1"}, "1", 2))
def test_substitution_composes(t, ax, ay, bx):
    a = {"x": ax, "y": ay, "v": Var("v", "2")}
    b = {"x": bx, "y": Var("x", "1"), "v": App("act", (Var("x", "1"), Var("v", "2")), "2")}
    composed = {k: substitute(val, b) for k, val in a.items()}
    assert substitute(substitute(t, a), b) == substitute(t, composed)


@given(terms(SIG, ALPHA, "2", 3))
def test_identity_substitution(t):
    assert substitute(t, {x: Var(x, s) for x, s in ALPHA.items()}) == t


def test_enumeration_monotone():
    sizes = [len(list(enumerate_terms(SIG, {"x": "1"}, d))) for d in range(4)]
    assert sizes == sorted(sizes)
