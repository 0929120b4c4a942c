import itertools
import math

import numpy as np
import pytest

from verbalg.closure import NOT_EQUIVALENT, closure_member
from verbalg.finite import FiniteAlgebra, in_variety
from verbalg.freeforms import builtin_spec
from verbalg.search import (
    NO_UP_TO_BOUNDS,
    YES,
    SearchConfig,
    auto_equivalent,
    candidate_words,
    classify_strongly_stable,
    counterexample_search,
    enumerate_models,
    enumerate_word_systems,
    replay_rejection,
    terms_of_size,
    verify_geom_witness,
)
from verbalg.signature import Signature
from verbalg.textio import parse_words
from verbalg.verbal import derive_algebra, identity_system, is_identity_system

from conftest import ACT_CORPUS, fixture_text, load_algebra, load_variety

MAGMA = Signature.build(["1"], {"mul": (("1", "1"), "1")})


@pytest.mark.parametrize("leaves", [1, 2, 3, 4])
def test_terms_of_size_counts_binary_trees(leaves):
    # Catalan(n-1) shapes, two letters per leaf
    catalan = math.comb(2 * (leaves - 1), leaves - 1) // leaves
    got = terms_of_size(MAGMA, {"x1": "1", "x2": "1"}, "1", leaves, leaves)
    assert len(got) == len(set(got)) == catalan * 2 ** leaves


def test_terms_of_size_depth_cap():
    unary = Signature.build(["1"], {"f": (("1",), "1")})
    assert [str(t) for t in terms_of_size(unary, {"x1": "1"}, "1", 1, 3)] == ["x1", "f(x1)", "f(f(x1))", "f(f(f(x1)))"]


def test_act_candidates_are_free_classes():
    spec = builtin_spec("act")
    mul = candidate_words(spec, "mul", 3)
    # non-projection associative words of length 2 and 3 in two letters
    assert len(mul) == 4 + 8
    act = candidate_words(spec, "act", 3)
    # act(x1,act(x1,x2)) and act(mul(x1,x1),x2) are one class; the first found is kept
    assert [str(w.body) for w in act] == ["act(x1,x2)", "act(x1,act(x1,x2))"]
    assert len(list(enumerate_word_systems(spec))) == len(mul) * len(act)
    with_proj = candidate_words(spec, "mul", 3, include_projections=True)
    assert len(with_proj) == len(mul) + 2


def test_semigroup_models_match_brute_force():
    spec = load_variety("semigroup.var")
    got = list(enumerate_models(spec, 2))
    brute = 1  # the one-element semigroup
    for cells in itertools.product(range(2), repeat=4):
        t = np.array(cells).reshape(2, 2)
        brute += all(t[t[a, b], c] == t[a, t[b, c]] for a in range(2) for b in range(2) for c in range(2))
    assert len(got) == brute == 9


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig("act", max_word_size=0)


@pytest.mark.parametrize("vid", ["act", "automaton"])
def test_classification_replays(vid):
    cfg = SearchConfig(vid)
    rep = classify_strongly_stable(cfg)
    assert [is_identity_system(W) for W in rep.accepted_systems] == [True]
    assert rep.examined == len(rep.accepted) + len(rep.rejected)
    assert all(replay_rejection(cfg, r) for r in rep.rejected)


def test_opposite_rejection_cites_mixed_law():
    cfg = SearchConfig("act")
    rep = classify_strongly_stable(cfg)
    (rej,) = [r for r in rep.rejected if r.words.as_dict() == {"act": "act(x1,x2)", "mul": "mul(x2,x1)"}]
    assert rej.reason == "variety-identity"
    assert "act(mul(" in rej.witness["identity"]
    assert replay_rejection(cfg, rej)


def test_parallel_classification_is_identical():
    one = classify_strongly_stable(SearchConfig("act", jobs=1)).to_dict()
    two = classify_strongly_stable(SearchConfig("act", jobs=2)).to_dict()
    assert one == two


def test_include_projections_keeps_identity_only():
    rep = classify_strongly_stable(SearchConfig("act", include_projections=True))
    assert [is_identity_system(W) for W in rep.accepted_systems] == [True]
    assert rep.examined > 24


@pytest.mark.parametrize("name", ACT_CORPUS)
def test_auto_equivalent_to_own_derivation(name):
    H = load_algebra(name, "act")
    spec = builtin_spec("act")
    W = identity_system(spec.signature)
    res = auto_equivalent(H, derive_algebra(H, W), spec=spec, candidates=[W], max_generators=2)
    assert res.verdict == YES and res.words == W


def test_auto_equivalent_no_candidates():
    spec = builtin_spec("act")
    H = load_algebra("act_z2.alg", "act")
    res = auto_equivalent(H, H, spec=spec, candidates=[])
    assert res.verdict == NO_UP_TO_BOUNDS and res.tried == []


def test_auto_equivalent_rejects_non_members():
    spec = load_variety("semigroup.var")
    bad = FiniteAlgebra(MAGMA, {"1": ("a", "b")}, {"mul": np.array([[1, 0], [0, 0]])})
    with pytest.raises(ValueError):
        auto_equivalent(bad, bad, spec=spec, candidates=[])


def test_counterexample_found_and_verified():
    spec = load_variety("bi_unary.var")
    W = parse_words(fixture_text("bi_unary_swap.words"), spec.signature)
    rep = counterexample_search(spec, W, max_size=2)
    hit = rep.hit
    assert hit is not None and hit.verdict.verdict == NOT_EQUIVALENT
    assert verify_geom_witness(hit.model, hit.derived, hit.verdict)
    g = hit.verdict
    assert closure_member(g.system, hit.model, g.pair) != closure_member(g.system, hit.derived, g.pair)


def test_counterexample_none_for_inversion():
    spec = load_variety("z3set.var")
    W = parse_words(fixture_text("z3set_invert.words"), spec.signature)
    rep = counterexample_search(spec, W, max_size=3)
    assert rep.hit is None and rep.scanned > 0


def test_counterexample_identity_skips_scan():
    spec = builtin_spec("act")
    rep = counterexample_search(spec, identity_system(spec.signature))
    assert rep.scanned == 0 and rep.hit is None


def test_enumerated_models_are_members():
    spec = builtin_spec("automaton")
    models = list(enumerate_models(spec, 1))
    assert models and all(in_variety(H, spec) for H in models)
