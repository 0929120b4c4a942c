from __future__ import annotations

from pathlib import Path

import pytest

from verbalg.finite import make_algebra
from verbalg.freeforms import builtin_spec
from verbalg.signature import Signature, VarietySpec
from verbalg.textio import parse_algebra, parse_variety

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_variety(name: str) -> VarietySpec:
    if name in ("act", "automaton"):
        return builtin_spec(name)
    return parse_variety(fixture_text(name))


def load_algebra(name: str, variety: str):
    return parse_algebra(fixture_text(name), load_variety(variety))


ACT_CORPUS = [
    "act_leftzero.alg",
    "act_z2.alg",
    "act_semilattice.alg",
    "act_rightzero.alg",
    "act_terminal.alg",
    "act_empty2.alg",
]


@pytest.fixture
def act():
    return builtin_spec("act")


@pytest.fixture
def semigroup_sig():
    return Signature.build(["1"], {"mul": (("1", "1"), "1")})


def projection(sig, side: str):
    """Two-element left (``side='left'``) or right projection semigroup."""
    pick = (lambda x, y: x) if side == "left" else (lambda x, y: y)
    return make_algebra(sig, {"1": ["a", "b"]}, {"mul": pick})


# -- one summary line per acceptance criterion ------------------------------------------

_CRITERIA: dict[int, str] = {}


def pytest_runtest_logreport(report):
    marker = "test_acceptance.py::test_criterion_"
    if marker not in report.nodeid:
        return
    n = int(report.nodeid.split(marker)[1].split("_")[0])
    if report.failed:
        _CRITERIA[n] = "FAIL"
    elif report.when == "call" and _CRITERIA.get(n) != "FAIL":
        _CRITERIA[n] = "PASS"
    elif report.skipped:
        _CRITERIA.setdefault(n, "SKIP")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {n}: {_CRITERIA[n]}")
