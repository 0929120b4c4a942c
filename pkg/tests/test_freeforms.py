import itertools

import pytest
from hypothesis import given, settings

import numpy as np

from verbalg.finite import all_assignments, eval_term, eval_vec
from verbalg.freeforms import NF, UnsupportedVariety, free_elements_up_to, free_variety, nf_equal, nf_eval
from verbalg.search import enumerate_models
from verbalg.terms import App, Var, enumerate_terms

from conftest import load_variety
from strategies import terms

g, h, x1, x2 = (Var(n, "1") for n in ("g", "h", "x1", "x2"))
v = Var("v", "2")


def mul(a, b):
    return App("mul", (a, b), "1")


def act(a, b):
    return App("act", (a, b), "2")


def test_concatenation():
    assert str(nf_eval("act", mul(x1, x2))) == "x1.x2"


def test_action_normal_form():
    a = nf_eval("act", act(mul(g, h), v))
    b = nf_eval("act", act(g, act(h, v)))
    assert a == b == NF("2", ("g", "h"), "v")
    assert str(a) == "g.h@v"


def test_automaton_state_word():
    a, b, q = Var("a", "1"), Var("b", "1"), Var("q", "2")
    t = App("next", (a, App("next", (b, q), "2")), "2")
    assert nf_eval("automaton", t) == NF("2", ("a", "b"), "q")


def test_equality():
    assert nf_equal("act", mul(x1, x2), mul(x1, x2))
    assert not nf_equal("act", mul(x1, x2), mul(x2, x1))
    assert nf_equal("act", mul(mul(x1, x2), x1), mul(x1, mul(x2, x1)))


def test_fragments():
    assert [str(f) for f in free_elements_up_to("act", {"x": "1"}, 2)] == ["x", "x.x"]
    assert [str(f) for f in free_elements_up_to("automaton", {"a": "1", "q": "2"}, 1)] == ["a", "@q"]
    assert free_elements_up_to("act", {"x": "1"}, 0) == []


def test_fragment_sizes_by_count():
    # words of length <= 3 over 2 letters, and (word of length <= 2) @ generator
    frag = free_elements_up_to("act", {"x1": "1", "x2": "1", "y": "2"}, 3)
    assert sum(f.sort == "1" for f in frag) == 2 + 4 + 8
    assert sum(f.sort == "2" for f in frag) == 1 + 2 + 4
    assert len(set(frag)) == len(frag)


def test_unsupported():
    with pytest.raises(UnsupportedVariety):
        nf_eval("groups", x1)


ACT_MODELS = list(enumerate_models(load_variety("act"), 2))
ALPHA = {"x1": "1", "x2": "1", "v": "2"}
ACT_SIG = load_variety("act").signature


@settings(max_examples=60, deadline=None)
@given(terms(ACT_SIG, ALPHA, "2", 3), terms(ACT_SIG, ALPHA, "2", 3))
def test_sound_against_models(t1, t2):
    if not nf_equal("act", t1, t2):
        return
    for H in ACT_MODELS:
        for a in itertools.product(range(H.size("1")), range(H.size("1")), range(H.size("2"))):
            env = dict(zip(("x1", "x2", "v"), a))
            assert eval_term(H, t1, env) == eval_term(H, t2, env)


@settings(max_examples=60, deadline=None)
@given(terms(ACT_SIG, ALPHA, "2", 3))
def test_nf_eval_is_homomorphic(t):
    fv = free_variety("act")
    if isinstance(t, App):
        assert nf_eval("act", t) == fv.apply(t.op, [nf_eval("act", a) for a in t.args])
    assert nf_eval("act", fv.to_term(nf_eval("act", t))) == nf_eval("act", t)


def _semigroups_of_order_three():
    """All associative tables on three points, each acting on itself by left multiplication."""
    from verbalg.finite import make_algebra

    sig = load_variety("act").signature
    tables = np.array(list(itertools.product(range(3), repeat=9))).reshape(-1, 3, 3)
    idx = np.arange(3)
    ok = np.ones(len(tables), dtype=bool)
    for a, b, c in itertools.product(idx, repeat=3):
        rows = np.arange(len(tables))
        ab = tables[rows, a, b]
        bc = tables[rows, b, c]
        ok &= tables[rows, ab, c] == tables[rows, a, bc]
    return [make_algebra(sig, {"1": 3, "2": 3}, {"mul": t, "act": t}) for t in tables[ok]]


def _models_up_to_three():
    return list(enumerate_models(load_variety("act"), 2)) + _semigroups_of_order_three()


def _unseparated_classes(depth):
    models = _models_up_to_three()
    alphabet = {"x1": "1", "x2": "1", "v": "2"}
    reps = {}
    for t in enumerate_terms(ACT_SIG, alphabet, depth):
        reps.setdefault(nf_eval("act", t), t)
    classes = {}
    for nf, t in reps.items():
        key = [nf.sort]
        for H in models:
            names, rows = all_assignments(H, alphabet)
            env = {x: rows[:, k] for k, x in enumerate(names)}
            key.append(np.broadcast_to(eval_vec(H, t, env), rows.shape[:1]).tobytes())
        classes.setdefault(tuple(key), []).append(str(nf))
    return [sorted(c) for c in classes.values() if len(c) > 1]


def test_completeness_probe():
    """Distinct normal forms of size <= 3 are separated by a model with at most three elements per sort."""
    clashes = _unseparated_classes(2)
    assert all(len(w.split(".")) == 4 for c in clashes for w in c)


def test_order_three_models_miss_four_letter_identities():
    # recorded finding: every semigroup of order <= 3 satisfies x.x.y.x = x.y.x.x and x.x.y.y = x.y.x.y
    assert sorted(_unseparated_classes(2)) == [
        ["x1.x1.x2.x1", "x1.x2.x1.x1"],
        ["x1.x1.x2.x2", "x1.x2.x1.x2"],
        ["x2.x1.x2.x1", "x2.x2.x1.x1"],
        ["x2.x1.x2.x2", "x2.x2.x1.x2"],
    ]
