"""Free algebras with decidable equality for the two built-in varieties.

``act``: semigroups acting on sets. Sort 1 is the free semigroup on
``X^(1)``; a sort-2 element is a possibly empty word followed by a sort-2
generator.

``automaton``: sort 1 is ``X^(1)`` itself; a state (sort 2) is a word applied
to a state generator; an output (sort 3) is a generator or ``out(a, state)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

from .signature import VarietySpec
from .terms import App, Term, TermError, Var

BUILTIN_IDS = ("act", "automaton")


class UnsupportedVariety(ValueError):
    pass


@dataclass(frozen=True)
class NF:
    """Normal form: ``word`` of sort-1 letters in front of an optional ``base``.

    ``base`` is a generator name (str), a nested :class:`NF` (automaton
    outputs) or ``None`` (sort-1 words).
    """

    sort: str
    word: tuple[str, ...]
    base: object = None

    def __str__(self) -> str:
        w = ".".join(self.word)
        if self.base is None:
            return w
        if isinstance(self.base, NF):
            return f"{w}>{self.base}"
        return f"{w}@{self.base}"


@lru_cache(maxsize=None)
def builtin_spec(variety_id: str) -> VarietySpec:
    from .textio import parse_variety

    if variety_id not in BUILTIN_IDS:
        raise UnsupportedVariety(f"no built-in variety {variety_id!r}; known: {', '.join(BUILTIN_IDS)}")
    text = resources.files("verbalg.builtins").joinpath(f"{variety_id}.var").read_text(encoding="utf-8")
    return parse_variety(text)


def builtin_id(v: VarietySpec) -> str | None:
    """The built-in id whose signature and identities coincide with ``v``."""
    for vid in BUILTIN_IDS:
        spec = builtin_spec(vid)
        if spec.signature == v.signature and spec.identities == v.identities:
            return vid
    return None


class FreeVariety:
    variety_id: str

    @property
    def spec(self) -> VarietySpec:
        return builtin_spec(self.variety_id)

    @property
    def signature(self):
        return self.spec.signature

    def generator(self, name: str, sort: str) -> NF:
        raise NotImplementedError

    def apply(self, op: str, args: Sequence[NF]) -> NF:
        raise NotImplementedError

    def to_term(self, nf: NF, alphabet: Mapping[str, str] | None = None) -> Term:
        raise NotImplementedError

    def size(self, nf: NF) -> int:
        """Number of generator occurrences."""
        n = len(nf.word)
        if isinstance(nf.base, NF):
            return n + self.size(nf.base)
        return n + (nf.base is not None)

    def elements_up_to(self, X: Mapping[str, str], bound: int) -> list[NF]:
        raise NotImplementedError

    def coerce(self, value, X: Mapping[str, str]) -> NF:
        if isinstance(value, NF):
            return value
        if value not in X:
            raise TermError(f"{value!r} is not a generator of {dict(X)}")
        return self.generator(value, X[value])

    def eval(self, t: Term, env: Mapping[str, object] | None = None) -> NF:
        """Normal form of ``t``; variables go to ``env`` (generator names or normal forms)."""
        if isinstance(t, Var):
            if env is None:
                return self.generator(t.name, t.sort)
            try:
                value = env[t.name]
            except KeyError:
                raise TermError(f"unbound variable {t.name!r}") from None
            nf = value if isinstance(value, NF) else self.generator(value, t.sort)
            if nf.sort != t.sort:
                raise TermError(f"{t.name} is bound to {nf} of sort {nf.sort!r}, expected {t.sort!r}")
            return nf
        return self.apply(t.op, [self.eval(a, env) for a in t.args])

    def sort_key(self, nf: NF, order: Mapping[str, int]):
        base = nf.base
        if isinstance(base, NF):
            base_key = (1, self.sort_key(base, order))
        elif base is None:
            base_key = (0, ())
        else:
            base_key = (0, (order[base],))
        return (nf.sort, self.size(nf), tuple(order[a] for a in nf.word), base_key)

    def _words(self, letters: Sequence[str], length: int):
        if length == 0:
            yield ()
            return
        for w in self._words(letters, length - 1):
            for a in letters:
                yield w + (a,)


class SemigroupActions(FreeVariety):
    variety_id = "act"

    def generator(self, name, sort):
        if sort == "1":
            return NF("1", (name,))
        if sort == "2":
            return NF("2", (), name)
        raise TermError(f"no sort {sort!r} in {self.variety_id}")

    def apply(self, op, args):
        u, y = args
        if op == "mul":
            return NF("1", u.word + y.word)
        if op == "act":
            return NF("2", u.word + y.word, y.base)
        raise TermError(f"undeclared operation {op!r}")

    def to_term(self, nf, alphabet=None):
        letters = [Var(a, "1") for a in nf.word]
        if nf.sort == "1":
            t = letters[-1]
            for a in reversed(letters[:-1]):
                t = App("mul", (a, t), "1")
            return t
        t = Var(nf.base, "2")
        for a in reversed(letters):
            t = App("act", (a, t), "2")
        return t

    def elements_up_to(self, X, bound):
        xs1 = sorted(x for x, s in X.items() if s == "1")
        xs2 = sorted(x for x, s in X.items() if s == "2")
        out = []
        for n in range(1, bound + 1):
            out += [NF("1", w) for w in self._words(xs1, n)]
        for n in range(1, bound + 1):
            for w in self._words(xs1, n - 1):
                out += [NF("2", w, v) for v in xs2]
        order = {x: i for i, x in enumerate(sorted(X))}
        return sorted(out, key=lambda f: self.sort_key(f, order))


class Automata(FreeVariety):
    variety_id = "automaton"

    def generator(self, name, sort):
        if sort == "1":
            return NF("1", (name,))
        if sort in ("2", "3"):
            return NF(sort, (), name)
        raise TermError(f"no sort {sort!r} in {self.variety_id}")

    def apply(self, op, args):
        a, y = args
        if op == "next":
            return NF("2", a.word + y.word, y.base)
        if op == "out":
            return NF("3", a.word, y)
        raise TermError(f"undeclared operation {op!r}")

    def to_term(self, nf, alphabet=None):
        if nf.sort == "1":
            return Var(nf.word[0], "1")
        if nf.sort == "3":
            if not nf.word:
                return Var(nf.base, "3")
            return App("out", (Var(nf.word[0], "1"), self.to_term(nf.base)), "3")
        t = Var(nf.base, "2")
        for a in reversed(nf.word):
            t = App("next", (Var(a, "1"), t), "2")
        return t

    def elements_up_to(self, X, bound):
        xs = {s: sorted(x for x, t in X.items() if t == s) for s in ("1", "2", "3")}
        out = []
        if bound >= 1:
            out += [NF("1", (a,)) for a in xs["1"]]
            out += [NF("3", (), o) for o in xs["3"]]
        states = []
        for n in range(1, bound + 1):
            for w in self._words(xs["1"], n - 1):
                states += [NF("2", w, q) for q in xs["2"]]
        out += states
        for y in states:
            if self.size(y) + 1 <= bound:
                out += [NF("3", (a,), y) for a in xs["1"]]
        order = {x: i for i, x in enumerate(sorted(X))}
        return sorted(out, key=lambda f: self.sort_key(f, order))


_VARIETIES = {"act": SemigroupActions(), "automaton": Automata()}


def free_variety(variety_id: str) -> FreeVariety:
    try:
        return _VARIETIES[variety_id]
    except KeyError:
        raise UnsupportedVariety(
            f"no free algebra for variety {variety_id!r}; known: {', '.join(BUILTIN_IDS)}"
        ) from None


def nf_eval(variety_id: str, t: Term, env: Mapping[str, object] | None = None) -> NF:
    return free_variety(variety_id).eval(t, env)


def nf_equal(variety_id: str, t1: Term, t2: Term, env: Mapping[str, object] | None = None) -> bool:
    if t1.sort != t2.sort:
        raise TermError(f"terms of different sorts {t1.sort!r} and {t2.sort!r}")
    return nf_eval(variety_id, t1, env) == nf_eval(variety_id, t2, env)


def free_elements_up_to(variety_id: str, X: Mapping[str, str], bound: int) -> list[NF]:
    if bound < 1:
        return []
    return free_variety(variety_id).elements_up_to(X, bound)
