"""Verbal operations, word systems and derived algebras.

A word for ``w : (i1..in; j)`` is a term over the designated variables
``x1 .. xn`` (``xk`` of sort ``ik``). A word system assigns one word to every
operation symbol; evaluating the words in ``H`` gives the derived algebra on
the same carriers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import freeforms
from .finite import (
    DEFAULT_BUDGET,
    FiniteAlgebra,
    eval_term,
    eval_vec,
    homomorphism_violation,
    in_variety,
    variety_violation,
)
from .signature import OpType, Signature, VarietySpec
from .terms import App, Term, TermError, Var, check_term, substitute, vars_of


class VerbalError(ValueError):
    pass


def designated_alphabet(t: OpType) -> dict[str, str]:
    return {f"x{k + 1}": s for k, s in enumerate(t.args)}


def designated_vars(t: OpType) -> tuple[Var, ...]:
    return tuple(Var(f"x{k + 1}", s) for k, s in enumerate(t.args))


@dataclass(frozen=True)
class Word:
    op: str
    type: OpType
    body: Term

    def __post_init__(self) -> None:
        if self.body.sort != self.type.result:
            raise VerbalError(f"word for {self.op!r} has sort {self.body.sort!r}, expected {self.type.result!r}")
        alphabet = designated_alphabet(self.type)
        for x, s in vars_of(self.body).items():
            if alphabet.get(x) != s:
                raise VerbalError(f"word for {self.op!r} uses {x}:{s} outside its designated variables")

    @property
    def uses_all_variables(self) -> bool:
        return set(vars_of(self.body)) == set(designated_alphabet(self.type))

    def __str__(self) -> str:
        return f"{self.op} := {self.body}"


@dataclass(frozen=True)
class WordSystem:
    """One word per operation symbol, ordered by operation name."""

    words: tuple[Word, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        words = tuple(sorted(self.words, key=lambda w: w.op))
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "_index", {w.op: w for w in words})

    def __getitem__(self, op: str) -> Word:
        return self._index[op]

    def __iter__(self):
        return iter(self.words)

    def __str__(self) -> str:
        return "; ".join(map(str, self.words))

    def as_dict(self) -> dict[str, str]:
        return {w.op: str(w.body) for w in self.words}


def make_word_system(sig: Signature, bodies: Mapping[str, Term]) -> WordSystem:
    missing = set(sig.op_names) - set(bodies)
    if missing:
        raise VerbalError(f"no word for operations {sorted(missing)}")
    extra = set(bodies) - set(sig.op_names)
    if extra:
        raise VerbalError(f"words for undeclared operations {sorted(extra)}")
    words = []
    for name, t in sig.ops:
        body = bodies[name]
        try:
            check_term(sig, body, designated_alphabet(t))
        except TermError as exc:
            raise VerbalError(f"word for {name!r}: {exc}") from None
        words.append(Word(name, t, body))
    return WordSystem(tuple(words))


def identity_system(sig: Signature) -> WordSystem:
    return WordSystem(tuple(Word(name, t, App(name, designated_vars(t), t.result)) for name, t in sig.ops))


def is_identity_system(W: WordSystem) -> bool:
    return all(w.body == App(w.op, designated_vars(w.type), w.type.result) for w in W)


def translate(t: Term, W: WordSystem) -> Term:
    """Rewrite every operation of ``t`` into its word (the term ``t`` read in the derived signature)."""
    if isinstance(t, Var):
        return t
    w = W[t.op]
    args = tuple(translate(a, W) for a in t.args)
    return substitute(w.body, {v.name: a for v, a in zip(designated_vars(w.type), args)})


# -- on finite algebras --------------------------------------------------------

def verbal_apply(H: FiniteAlgebra, w: Word, args: Sequence[int]) -> int:
    if len(args) != w.type.arity:
        raise VerbalError(f"{w.op!r} takes {w.type.arity} arguments, got {len(args)}")
    for k, (a, s) in enumerate(zip(args, w.type.args)):
        if H.size(s) == 0:
            raise VerbalError(f"carrier of sort {s!r} is empty: the verbal operation has an empty domain")
        if not 0 <= a < H.size(s):
            raise VerbalError(f"argument {k} = {a} is not an element of sort {s!r}")
    return eval_term(H, w.body, {f"x{k + 1}": a for k, a in enumerate(args)})


def derived_table(H: FiniteAlgebra, w: Word) -> np.ndarray:
    shape = tuple(H.size(s) for s in w.type.args)
    if 0 in shape:
        return np.zeros(shape, dtype=np.int64)
    grid = np.indices(shape, dtype=np.int64) if shape else ()
    env = {f"x{k + 1}": grid[k] for k in range(len(shape))}
    return np.broadcast_to(eval_vec(H, w.body, env), shape).astype(np.int64)


def derive_algebra(H: FiniteAlgebra, W: WordSystem) -> FiniteAlgebra:
    """``H`` with each operation replaced by the verbal operation of its word."""
    for w in W:
        if H.signature.op(w.op) != w.type:
            raise VerbalError(f"word for {w.op!r} has type {w.type}, signature says {H.signature.op(w.op)}")
    return FiniteAlgebra(H.signature, H.carriers, {w.op: derived_table(H, w) for w in W})


def derived_variety_violation(H: FiniteAlgebra, W: WordSystem, v: VarietySpec,
                              budget: int = DEFAULT_BUDGET):
    """First identity of ``v`` failing in the derived algebra, as ``(index, assignment)``."""
    return variety_violation(derive_algebra(H, W), v, budget)


def check_derived_in_variety(H: FiniteAlgebra, W: WordSystem, v: VarietySpec,
                             budget: int = DEFAULT_BUDGET) -> bool:
    return in_variety(derive_algebra(H, W), v, budget)


def naturality_check(H1: FiniteAlgebra, H2: FiniteAlgebra, phi: Mapping[str, Sequence[int]],
                     W: WordSystem) -> bool:
    """Whether ``phi`` is also a homomorphism between the derived algebras."""
    D1, D2 = derive_algebra(H1, W), derive_algebra(H2, W)
    return homomorphism_violation(H1.signature, phi, D1, D2) is None


# -- on free algebras of the built-in varieties -------------------------------

REJECTED = "REJECTED"
BOUNDED_OK = "BOUNDED-OK"


@dataclass
class InducedMap:
    """The homomorphism fixing the generators, restricted to a finite fragment."""

    variety_id: str
    alphabet: dict[str, str]
    bound: int
    verdict: str
    reason: str | None
    witness: dict | None
    mapping: dict  # NF -> NF
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict == BOUNDED_OK

    def __call__(self, nf):
        try:
            return self.mapping[nf]
        except KeyError:
            raise VerbalError(f"{nf} lies outside the verified fragment (bound {self.bound})") from None

    def inverse(self) -> dict:
        return {v: k for k, v in self.mapping.items()}


def induced_s(variety_id: str, X: Mapping[str, str], W: WordSystem, bound: int = 6) -> InducedMap:
    """Generator-fixing map from the free algebra to its derived algebra.

    Only normal forms of size <= ``bound`` are mapped.

    Rejection (injectivity, surjectivity, homomorphism) always carries a
    witness; surjectivity failures are definitive only when every word uses
    all of its variables (images are then never shorter than their preimages).
    """
    fv = freeforms.free_variety(variety_id)
    X = dict(sorted(X.items()))
    fragment = fv.elements_up_to(X, bound)
    apply_s = lambda f: fv.eval(translate(fv.to_term(f), W))  # noqa: E731
    mapping = {f: apply_s(f) for f in fragment}

    def result(verdict, reason=None, witness=None, notes=()):
        return InducedMap(variety_id, X, bound, verdict, reason, witness, mapping, list(notes))

    seen = {}
    for f in fragment:
        img = mapping[f]
        if img in seen:
            return result(REJECTED, "not-injective",
                          {"left": str(seen[img]), "right": str(f), "image": str(img)})
        seen[img] = f

    notes = []
    monotone = all(w.uses_all_variables for w in W)
    for y in fragment:
        if y in seen:
            continue
        if monotone:
            return result(REJECTED, "not-surjective", {"missing": str(y), "size": fv.size(y)})
        notes.append(f"{y} has no preimage up to the bound; inconclusive because some word drops a variable")
        break

    by_sort: dict[str, list] = {}
    for f in fragment:
        by_sort.setdefault(f.sort, []).append(f)
    for w in W:
        pools = [by_sort.get(s, []) for s in w.type.args]
        for args in itertools.product(*pools):
            if sum(fv.size(a) for a in args) > bound:
                continue
            direct = fv.apply(w.op, args)
            if direct not in mapping:
                continue
            lhs = mapping[direct]
            env = {f"x{k + 1}": mapping[a] for k, a in enumerate(args)}
            rhs = fv.eval(w.body, env)
            if lhs != rhs:
                return result(REJECTED, "not-homomorphism", {
                    "op": w.op, "args": [str(a) for a in args],
                    "s_of_op": str(lhs), "derived_op_of_s": str(rhs),
                }, notes)
    return result(BOUNDED_OK, notes=notes)


@dataclass
class BCheck:
    morphism: int
    composite: str
    op: str | None
    args: tuple
    ok: bool | None
    detail: str = ""


@dataclass
class BReport:
    checks: list[BCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok is not False for c in self.checks) and any(c.ok for c in self.checks)

    @property
    def failed(self) -> list[BCheck]:
        return [c for c in self.checks if c.ok is False]


def check_b_conditions(variety_id: str, W: WordSystem,
                       morphisms: Iterable[tuple[Mapping[str, str], Mapping[str, str], Mapping[str, object]]],
                       bound: int = 5) -> BReport:
    """Check that ``s_B mu s_A^-1`` and ``s_B^-1 mu s_A`` act as homomorphisms on fragments.

    Each morphism is ``(X_A, X_B, images)`` where ``images`` sends every
    generator of ``X_A`` to a normal form (or generator name) of ``F(X_B)``.
    """
    fv = freeforms.free_variety(variety_id)
    checks: list[BCheck] = []
    for m, (XA, XB, images) in enumerate(morphisms):
        sA = induced_s(variety_id, XA, W, bound)
        sB = induced_s(variety_id, XB, W, bound)
        if not (sA.ok and sB.ok):
            bad = "A" if not sA.ok else "B"
            checks.append(BCheck(m, "-", None, (), None, f"skipped: s_{bad} rejected ({(sA if bad == 'A' else sB).reason})"))
            continue
        env = {x: fv.coerce(v, XB) for x, v in images.items()}

        def mu(f):
            return fv.eval(fv.to_term(f), env)

        sA_inv, sB_inv = sA.inverse(), sB.inverse()
        composites = {}
        for u, f in sA_inv.items():
            g = mu(f)
            if g in sB.mapping:
                composites.setdefault("s_B mu s_A^-1", {})[u] = sB.mapping[g]
        for f, u in sA.mapping.items():
            g = mu(u)
            if g in sB_inv:
                composites.setdefault("s_B^-1 mu s_A", {})[f] = sB_inv[g]
        if not composites:
            checks.append(BCheck(m, "-", None, (), None, "skipped: no fragment element stays within the bound"))
        for name, nu in composites.items():
            by_sort: dict[str, list] = {}
            for u in nu:
                by_sort.setdefault(u.sort, []).append(u)
            for w in W:
                for args in itertools.product(*[by_sort.get(s, []) for s in w.type.args]):
                    top = fv.apply(w.op, args)
                    if top not in nu:
                        continue
                    lhs = nu[top]
                    rhs = fv.apply(w.op, [nu[a] for a in args])
                    checks.append(BCheck(m, name, w.op, tuple(map(str, args)), lhs == rhs,
                                         "" if lhs == rhs else f"{lhs} != {rhs}"))
    return BReport(checks)
