"""The absolutely free term algebra over a sorted alphabet."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .signature import Signature


class TermError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name

    @property
    def depth(self) -> int:
        return 0


@dataclass(frozen=True, slots=True)
class App:
    op: str
    args: tuple
    sort: str
    depth: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "depth", 1 + max((a.depth for a in self.args), default=-1))

    def __str__(self) -> str:
        return f"{self.op}({','.join(map(str, self.args))})"


Term = Union[Var, App]


def mk_var(name: str, sort: str) -> Var:
    return Var(name, sort)


def mk_app(sig: Signature, op: str, children) -> App:
    if not sig.has_op(op):
        raise TermError(f"undeclared operation {op!r}")
    t = sig.op(op)
    children = tuple(children)
    if len(children) != t.arity:
        raise TermError(f"{op!r} expects {t.arity} arguments, got {len(children)}")
    for pos, (child, expected) in enumerate(zip(children, t.args)):
        if child.sort != expected:
            raise TermError(
                f"sort mismatch at position {pos} of {op!r}: expected {expected!r}, got {child.sort!r}"
            )
    return App(op, children, t.result)


def check_term(sig: Signature, t: Term, alphabet: Mapping[str, str] | None = None) -> None:
    """Raise :class:`TermError` unless ``t`` is well sorted (and over ``alphabet``)."""
    if isinstance(t, Var):
        if t.sort not in sig.sorts:
            raise TermError(f"variable {t.name!r} has undeclared sort {t.sort!r}")
        if alphabet is not None:
            if t.name not in alphabet:
                raise TermError(f"undeclared variable {t.name!r}")
            if alphabet[t.name] != t.sort:
                raise TermError(f"variable {t.name!r} used with sort {t.sort!r}, declared {alphabet[t.name]!r}")
        return
    for child in t.args:
        check_term(sig, child, alphabet)
    rebuilt = mk_app(sig, t.op, t.args)
    if rebuilt.sort != t.sort:
        raise TermError(f"cached sort {t.sort!r} of {t.op!r} disagrees with its type")


def vars_of(t: Term) -> dict[str, str]:
    """Variables occurring in ``t`` with their sorts, ordered by name."""
    found: dict[str, str] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            found[u.name] = u.sort
        else:
            stack.extend(u.args)
    return dict(sorted(found.items()))


def size(t: Term) -> int:
    """Number of symbol occurrences."""
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def substitute(t: Term, assignment: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        try:
            image = assignment[t.name]
        except KeyError:
            raise TermError(f"unbound variable {t.name!r}") from None
        if image.sort != t.sort:
            raise TermError(f"binding {t.name} -> {image} changes sort {t.sort!r} to {image.sort!r}")
        return image
    return App(t.op, tuple(substitute(a, assignment) for a in t.args), t.sort)


def compose(a: Mapping[str, Term], b: Mapping[str, Term]) -> dict[str, Term]:
    """The assignment ``x -> substitute(a[x], b)``."""
    return {x: substitute(t, b) for x, t in a.items()}


def enumerate_terms(sig: Signature, alphabet: Mapping[str, str], max_depth: int) -> Iterator[Term]:
    """All well sorted terms of depth <= ``max_depth``, each once.

    Order: by depth; variables (by name) then constants (by name) at depth 0;
    at each greater depth ops by name, then argument tuples in the
    lexicographic order induced by earlier output.
    """
    if max_depth < 0:
        return
    by_sort: dict[str, list[Term]] = {s: [] for s in sig.sorts}
    level: list[Term] = [Var(x, s) for x, s in sorted(alphabet.items())]
    level += [App(c, (), sig.op(c).result) for c in sig.constants]
    for t in level:
        by_sort[t.sort].append(t)
    yield from level
    for depth in range(1, max_depth + 1):
        level = []
        for name, t in sig.ops:
            if t.arity == 0:
                continue
            pools = [by_sort[s] for s in t.args]
            for children in itertools.product(*pools):
                if max(c.depth for c in children) == depth - 1:
                    level.append(App(name, children, t.result))
        if not level:
            break
        for t in level:
            by_sort[t.sort].append(t)
        yield from level


def terms_by_sort(sig: Signature, alphabet: Mapping[str, str], max_depth: int) -> dict[str, list[Term]]:
    out: dict[str, list[Term]] = {s: [] for s in sig.sorts}
    for t in enumerate_terms(sig, alphabet, max_depth):
        out[t.sort].append(t)
    return out
