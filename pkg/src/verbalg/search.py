"""Word-system search, classification and automorphic equivalence."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import freeforms
from .closure import (
    NOT_EQUIVALENT,
    GeomVerdict,
    closure_member,
    geom_equivalent,
)
from .finite import DEFAULT_BUDGET, BudgetExceeded, FiniteAlgebra, in_variety, variety_violation
from .signature import Signature, VarietySpec
from .terms import App, Term, Var
from .textio import format_algebra
from .verbal import (
    BOUNDED_OK,
    REJECTED,
    Word,
    WordSystem,
    derive_algebra,
    designated_alphabet,
    induced_s,
    is_identity_system,
)


@dataclass(frozen=True)
class SearchConfig:
    variety_id: str
    max_word_size: int = 3
    fragment_bound: int = 6
    probe_size: int = 2
    fragment_generators: int = 2
    include_projections: bool = False
    budget: int = DEFAULT_BUDGET
    jobs: int = 1

    def __post_init__(self) -> None:
        for name in ("max_word_size", "fragment_bound", "probe_size", "fragment_generators", "budget", "jobs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")

    @property
    def spec(self) -> VarietySpec:
        return freeforms.builtin_spec(self.variety_id)


# -- candidate words ----------------------------------------------------------------

def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def terms_of_size(sig: Signature, alphabet: Mapping[str, str], sort: str, leaves: int, depth: int) -> list[Term]:
    """Terms of ``sort`` with exactly ``leaves`` leaf occurrences and depth <= ``depth``."""
    alphabet = dict(sorted(alphabet.items()))
    memo: dict = {}

    def build(s: str, n: int, d: int) -> list[Term]:
        key = (s, n, d)
        if key in memo:
            return memo[key]
        out: list[Term] = []
        if n == 1:
            out += [Var(x, s) for x, xs in alphabet.items() if xs == s]
            out += [App(c, (), s) for c in sig.constants if sig.op(c).result == s]
        if d >= 1:
            for name, t in sig.ops:
                if t.result != s or t.arity == 0 or t.arity > n:
                    continue
                for parts in _compositions(n, t.arity):
                    pools = [build(a, p, d - 1) for a, p in zip(t.args, parts)]
                    out += [App(name, args, s) for args in itertools.product(*pools)]
        memo[key] = out
        return out

    return build(sort, leaves, depth)


def _is_projection(body: Term) -> bool:
    return isinstance(body, Var)


def candidate_words(spec: VarietySpec, op: str, max_size: int, include_projections: bool = False) -> list[Word]:
    """Words for ``op`` of size <= ``max_size``, one per element of the free algebra.

    Words equal in the free algebra define the same operation on every member
    of the variety, so only the first term of each class is kept.
    """
    sig = spec.signature
    t = sig.op(op)
    alphabet = designated_alphabet(t)
    vid = freeforms.builtin_id(spec)
    if vid is None and spec.identities:
        raise freeforms.UnsupportedVariety(
            "word enumeration needs a built-in variety or one without identities")
    fv = freeforms.free_variety(vid) if vid else None
    seen = set()
    words = []
    for n in range(1, max_size + 1):
        for body in terms_of_size(sig, alphabet, t.result, n, max_size):
            if _is_projection(body) and not include_projections:
                continue
            key = fv.eval(body) if fv else body
            if key in seen:
                continue
            seen.add(key)
            words.append(Word(op, t, body))
    return words


def enumerate_word_systems(cfg_or_spec, max_word_size: int | None = None,
                           include_projections: bool | None = None) -> Iterator[WordSystem]:
    """All word systems in canonical order (product over operations sorted by name)."""
    if isinstance(cfg_or_spec, SearchConfig):
        spec = cfg_or_spec.spec
        max_word_size = cfg_or_spec.max_word_size if max_word_size is None else max_word_size
        include_projections = cfg_or_spec.include_projections if include_projections is None else include_projections
    else:
        spec = cfg_or_spec
        max_word_size = 3 if max_word_size is None else max_word_size
        include_projections = bool(include_projections)
    pools = [candidate_words(spec, op, max_word_size, include_projections) for op in spec.signature.op_names]
    for combo in itertools.product(*pools):
        yield WordSystem(tuple(combo))


# -- models ---------------------------------------------------------------------------

def enumerate_models(spec: VarietySpec, max_size: int, min_size: int = 1,
                     budget: int = DEFAULT_BUDGET) -> Iterator[FiniteAlgebra]:
    """Every algebra of the variety with carrier sizes in ``[min_size, max_size]``.

    Order: carrier sizes lexicographically, then tables in lexicographic order.
    """
    sig = spec.signature
    for sizes in itertools.product(range(min_size, max_size + 1), repeat=len(sig.sorts)):
        size = dict(zip(sig.sorts, sizes))
        if any(size[sig.op(c).result] == 0 for c in sig.constants):
            continue
        shapes = {name: tuple(size[s] for s in t.args) for name, t in sig.ops}
        count = math.prod(size[t.result] ** math.prod(shapes[name]) for name, t in sig.ops)
        if count > budget:
            raise BudgetExceeded(f"models with carrier sizes {sizes}", count, budget)
        carriers = {s: tuple(f"{s}{chr(97 + k)}" if k < 26 else f"{s}_{k}" for k in range(size[s]))
                    for s in sig.sorts}
        per_op = []
        for name, t in sig.ops:
            cells = math.prod(shapes[name])
            per_op.append(itertools.product(range(size[t.result]), repeat=cells))
        for choice in itertools.product(*[list(p) for p in per_op]):
            tables = {name: np.array(c, dtype=np.int64).reshape(shapes[name])
                      for (name, _), c in zip(sig.ops, choice)}
            H = FiniteAlgebra(sig, carriers, tables)
            if in_variety(H, spec, budget):
                yield H


@lru_cache(maxsize=None)
def _probe_models(variety_id: str, probe_size: int, budget: int) -> tuple:
    return tuple(enumerate_models(freeforms.builtin_spec(variety_id), probe_size, 1, budget))


# -- classification -------------------------------------------------------------------

@dataclass
class Rejection:
    words: WordSystem
    reason: str
    witness: dict

    def to_dict(self) -> dict:
        return {"words": self.words.as_dict(), "reason": self.reason, "witness": self.witness}


@dataclass
class Acceptance:
    words: WordSystem
    bound: int
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"words": self.words.as_dict(), "verdict": BOUNDED_OK, "bound": self.bound, "notes": self.notes}


@dataclass
class ClassificationReport:
    config: SearchConfig
    examined: int
    rejected: list[Rejection]
    accepted: list[Acceptance]

    @property
    def accepted_systems(self) -> list[WordSystem]:
        return [a.words for a in self.accepted]

    def to_dict(self) -> dict:
        c = self.config
        return {
            "variety": c.variety_id,
            "bounds": {"max_word_size": c.max_word_size, "fragment_bound": c.fragment_bound,
                       "probe_size": c.probe_size, "fragment_generators": c.fragment_generators,
                       "include_projections": c.include_projections},
            "examined": self.examined,
            "accepted": [a.to_dict() for a in self.accepted],
            "rejected": [r.to_dict() for r in self.rejected],
        }


def fragment_alphabet(sig: Signature, per_sort: int) -> dict[str, str]:
    from .closure import variable_names

    return variable_names(sig, {s: per_sort for s in sig.sorts})


def _assignment_names(H: FiniteAlgebra, ident, assignment: Mapping[str, int]) -> dict[str, str]:
    variables = ident.variables
    return {x: H.carriers[variables[x]][v] for x, v in sorted(assignment.items())}


def validate_candidate(cfg: SearchConfig, W: WordSystem) -> Rejection | Acceptance:
    spec = cfg.spec
    for H in _probe_models(cfg.variety_id, cfg.probe_size, cfg.budget):
        bad = variety_violation(derive_algebra(H, W), spec, cfg.budget)
        if bad is not None:
            idx, assignment = bad
            ident = spec.identities[idx]
            return Rejection(W, "variety-identity", {
                "model": format_algebra(H),
                "identity_index": idx,
                "identity": str(ident),
                "assignment": _assignment_names(H, ident, assignment),
            })
    X = fragment_alphabet(spec.signature, cfg.fragment_generators)
    s = induced_s(cfg.variety_id, X, W, cfg.fragment_bound)
    if not s.ok:
        return Rejection(W, s.reason, {"alphabet": X, "bound": cfg.fragment_bound, **s.witness})
    return Acceptance(W, cfg.fragment_bound, s.notes)


def classify_strongly_stable(cfg: SearchConfig) -> ClassificationReport:
    """Sort every candidate word system into rejected (with witness) or accepted up to the bounds."""
    candidates = list(enumerate_word_systems(cfg))
    _probe_models(cfg.variety_id, cfg.probe_size, cfg.budget)  # warm the cache before threading
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(lambda W: validate_candidate(cfg, W), candidates))
    else:
        results = [validate_candidate(cfg, W) for W in candidates]
    rejected = [r for r in results if isinstance(r, Rejection)]
    accepted = [r for r in results if isinstance(r, Acceptance)]
    return ClassificationReport(cfg, len(candidates), rejected, accepted)


def replay_rejection(cfg: SearchConfig, rej: Rejection) -> bool:
    """Re-run the cited check on the cited witness; true iff the failure reproduces."""
    from .finite import eval_term
    from .textio import parse_algebra

    spec = cfg.spec
    if rej.reason == "variety-identity":
        H = parse_algebra(rej.witness["model"], spec)
        if not in_variety(H, spec, cfg.budget):
            return False
        ident = spec.identities[rej.witness["identity_index"]]
        sorts = ident.variables
        a = {x: H.element(sorts[x], name) for x, name in rej.witness["assignment"].items()}
        D = derive_algebra(H, rej.words)
        return eval_term(D, ident.lhs, a) != eval_term(D, ident.rhs, a)
    s = induced_s(cfg.variety_id, rej.witness["alphabet"], rej.words, rej.witness["bound"])
    return s.verdict == REJECTED and s.reason == rej.reason


# -- automorphic equivalence ---------------------------------------------------------

YES = "YES"
NO_UP_TO_BOUNDS = "NO_UP_TO_BOUNDS"


@dataclass
class AutoVerdict:
    verdict: str
    words: WordSystem | None
    tried: list[tuple[WordSystem, GeomVerdict]]

    @property
    def yes(self) -> bool:
        return self.verdict == YES


def auto_equivalent(H1: FiniteAlgebra, H2: FiniteAlgebra, cfg: SearchConfig | None = None,
                    max_generators: int = 3, spec: VarietySpec | None = None,
                    candidates: Sequence[WordSystem] | None = None,
                    budget: int = DEFAULT_BUDGET) -> AutoVerdict:
    """Search word systems W with H1 geometrically equivalent to the W-derived algebra of H2, up to the bounds.

    Candidates default to the accepted list of :func:`classify_strongly_stable`.
    """
    if spec is None:
        if cfg is None:
            raise ValueError("pass a SearchConfig or a variety spec")
        spec = cfg.spec
    for k, H in enumerate((H1, H2), start=1):
        if not in_variety(H, spec, budget):
            raise ValueError(f"algebra {k} is not in the variety")
    if candidates is None:
        if cfg is None:
            raise ValueError("candidates are required without a SearchConfig")
        candidates = classify_strongly_stable(cfg).accepted_systems
    tried = []
    for W in candidates:
        g = geom_equivalent(H1, derive_algebra(H2, W), max_generators, budget)
        tried.append((W, g))
        if g.equivalent:
            return AutoVerdict(YES, W, tried)
    return AutoVerdict(NO_UP_TO_BOUNDS, None, tried)


# -- counterexamples ----------------------------------------------------------------------

@dataclass
class CounterexampleHit:
    model: FiniteAlgebra
    derived: FiniteAlgebra
    verdict: GeomVerdict
    index: int  # position of the model in the scan


@dataclass
class CounterexampleReport:
    scanned: int
    hit: CounterexampleHit | None


def verify_geom_witness(H1: FiniteAlgebra, H2: FiniteAlgebra, g: GeomVerdict, budget: int = DEFAULT_BUDGET) -> bool:
    """Re-check a NOT_EQUIVALENT verdict: the pair lies in exactly one of the two closures."""
    if g.verdict != NOT_EQUIVALENT:
        return False
    in1 = closure_member(g.system, H1, g.pair, budget)
    in2 = closure_member(g.system, H2, g.pair, budget)
    return in1 != in2 and (in1 if g.closed_over == 1 else in2)


def counterexample_search(spec: VarietySpec, W: WordSystem, max_size: int = 2,
                          models: Iterable[FiniteAlgebra] | None = None, max_generators: int = 2,
                          budget: int = DEFAULT_BUDGET) -> CounterexampleReport:
    """First model not geometrically equivalent to its W-derived algebra, witness re-verified."""
    if is_identity_system(W):
        pool: Iterable[FiniteAlgebra] = ()
    elif models is not None:
        pool = models
    else:
        pool = enumerate_models(spec, max_size, 1, budget)
    scanned = 0
    for k, H in enumerate(pool):
        scanned += 1
        D = derive_algebra(H, W)
        g = geom_equivalent(H, D, max_generators, budget)
        if g.verdict == NOT_EQUIVALENT:
            if not verify_geom_witness(H, D, g, budget):
                raise AssertionError("counterexample witness failed re-verification")
            return CounterexampleReport(scanned, CounterexampleHit(H, D, g, k))
    return CounterexampleReport(scanned, None)
