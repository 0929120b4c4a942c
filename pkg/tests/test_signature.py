import itertools

from hypothesis import given, strategies as st

from verbalg.signature import Identity, OpType, Signature, VarietySpec, validate_signature, validate_variety
from verbalg.terms import App, Var


def test_minimal_signature_ok():
    assert validate_signature(Signature.build(["s"], {"mul": (("s", "s"), "s")})).ok


def test_undeclared_sort_reported():
    report = validate_signature(Signature.build(["s"], {"f": (("t",), "s")}))
    assert not report.ok
    assert "undeclared sort 't'" in report.violations[0]


def test_two_sorted_action_signature_ok(act):
    assert validate_signature(act.signature).ok
    assert act.signature.op("mul") == OpType(("1", "1"), "1")
    assert act.signature.op("act") == OpType(("1", "2"), "2")


def test_duplicate_operation_reported():
    sig = Signature(("s",), (("f", OpType(("s",), "s")), ("f", OpType((), "s"))))
    assert "duplicate operation 'f'" in validate_signature(sig).violations


def test_action_variety_ok(act):
    assert validate_variety(act).ok
    assert len(act.identities) == 2


def test_identity_across_sorts_rejected(act):
    ident = Identity.of({"x": "1", "y": "2"}, Var("x", "1"), Var("y", "2"))
    report = validate_variety(VarietySpec(act.signature, (ident,)))
    assert any("different sorts" in v for v in report.violations)


def test_empty_identity_list_ok(act):
    assert validate_variety(VarietySpec(act.signature, ())).ok


def test_identity_with_undeclared_variable_rejected(act):
    ident = Identity.of({"x": "1"}, App("mul", (Var("x", "1"), Var("z", "1")), "1"), Var("x", "1"))
    assert not validate_variety(VarietySpec(act.signature, (ident,))).ok


@given(st.permutations(["a", "b", "c"]), st.booleans())
def test_validation_is_order_independent(order, broken):
    ops = {"f": (("a",), "b"), "g": (("b", "c"), "a"), "h": ((), "c")}
    if broken:
        ops["k"] = (("zz",), "a")
    items = [(n, OpType(tuple(a), r)) for n, (a, r) in ops.items()]
    verdicts = set()
    for perm in itertools.permutations(items):
        verdicts.add(validate_signature(Signature(tuple(order), tuple(perm))).violations)
    assert len(verdicts) == 1
