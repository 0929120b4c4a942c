"""Solution sets, algebraic closures and geometric equivalence over finite algebras.

Closed congruences are never stored as pair sets. A congruence is the kernel
of a family of assignments ``X -> H_k``, represented by the subalgebra ``D`` of
the product generated by the images of ``X`` (the diagonal subalgebra). Kernel
inclusion ``ker D1 <= ker D2`` holds iff the subalgebra of ``D1 x D2`` generated
by the paired generators is the graph of a function; when it is not, the two
elements sharing a first component come with terms that separate the kernels.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import freeforms
from .finite import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    FiniteAlgebra,
    Generated,
    all_assignments,
    eval_vec,
    generate,
)
from .signature import Signature
from .terms import App, Term, TermError, Var, check_term, enumerate_terms

Pair = tuple[Term, Term]

_CODE_LIMIT = 2**62
_MAX_FACTORS = 24


@dataclass(frozen=True)
class EquationSystem:
    alphabet: tuple[tuple[str, str], ...]
    pairs: tuple[Pair, ...] = ()

    @classmethod
    def of(cls, alphabet: Mapping[str, str], pairs: Iterable[Pair] = ()) -> "EquationSystem":
        return cls(tuple(sorted(alphabet.items())), tuple(pairs))

    @property
    def variables(self) -> dict[str, str]:
        return dict(self.alphabet)

    def with_pairs(self, extra: Iterable[Pair]) -> "EquationSystem":
        return EquationSystem(self.alphabet, self.pairs + tuple(extra))

    def validate(self, sig: Signature) -> None:
        for k, (a, b) in enumerate(self.pairs):
            check_term(sig, a, self.variables)
            check_term(sig, b, self.variables)
            if a.sort != b.sort:
                raise TermError(f"equation {k}: sides have sorts {a.sort!r} and {b.sort!r}")


@dataclass
class SolutionSet:
    system: EquationSystem
    algebra: FiniteAlgebra
    names: tuple[str, ...]
    rows: np.ndarray  # one assignment per row, columns follow ``names``

    def __len__(self) -> int:
        return self.rows.shape[0]

    def assignments(self) -> list[dict[str, int]]:
        return [{x: int(v) for x, v in zip(self.names, row)} for row in self.rows]


def _pair_mask(H: FiniteAlgebra, pairs: Sequence[Pair], names, rows) -> np.ndarray:
    env = {x: rows[:, k] for k, x in enumerate(names)}
    mask = np.ones(rows.shape[0], dtype=bool)
    for a, b in pairs:
        mask &= np.broadcast_to(eval_vec(H, a, env) == eval_vec(H, b, env), mask.shape)
    return mask


def solutions(T: EquationSystem, H: FiniteAlgebra, budget: int = DEFAULT_BUDGET) -> SolutionSet:
    """Every assignment ``X -> H`` whose induced homomorphism equalises all pairs of ``T``."""
    names, rows = all_assignments(H, T.variables, budget)
    if rows.shape[0]:
        rows = rows[_pair_mask(H, T.pairs, names, rows)]
    return SolutionSet(T, H, names, rows)


def closure_member(T: EquationSystem, H: FiniteAlgebra, pair: Pair, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether ``pair`` lies in the closure of ``T`` over ``H`` (true for everything when no solutions exist)."""
    if pair[0].sort != pair[1].sort:
        raise TermError(f"pair sides have sorts {pair[0].sort!r} and {pair[1].sort!r}")
    sols = solutions(T, H, budget)
    if len(sols) == 0:
        return True
    return bool(_pair_mask(H, [pair], sols.names, sols.rows).all())


# -- diagonal subalgebras ---------------------------------------------------------

@dataclass
class Diagonal:
    """Image of F(X) in a product of finite algebras, with one term per element."""

    alphabet: dict[str, str]
    algebra: FiniteAlgebra
    gens: dict[str, int]
    reps: dict[str, list[Term]]

    def element_of(self, t: Term) -> int:
        return int(eval_vec(self.algebra, t, self.gens))

    def contains(self, pair: Pair) -> bool:
        return self.element_of(pair[0]) == self.element_of(pair[1])

    def key(self) -> tuple:
        """Equal keys iff equal kernels (elements are numbered canonically by discovery)."""
        tables = tuple((op, self.algebra.tables[op].tobytes(), self.algebra.tables[op].shape)
                       for op in self.algebra.signature.op_names)
        sizes = tuple(self.algebra.size(s) for s in self.algebra.signature.sorts)
        return (tuple(sorted(self.gens.items())), sizes, tables)


def _seed_terms(sig: Signature, names: Sequence[str], alphabet: Mapping[str, str]) -> list[Term]:
    return [Var(x, alphabet[x]) for x in names] + [App(c, (), sig.op(c).result) for c in sig.constants]


def _chunks(sig: Signature, base: FiniteAlgebra | None, algebras: Sequence[FiniteAlgebra]):
    """Split ``algebras`` into runs whose product with ``base`` fits the int64 encoding."""
    run: list[int] = []
    prod = {s: (base.size(s) if base is not None else 1) for s in sig.sorts}
    cur = dict(prod)
    for k, alg in enumerate(algebras):
        nxt = {s: cur[s] * max(alg.size(s), 1) for s in sig.sorts}
        if run and (max(nxt.values()) >= _CODE_LIMIT or len(run) >= _MAX_FACTORS):
            yield run
            run, cur = [], dict(prod)
            nxt = {s: cur[s] * max(alg.size(s), 1) for s in sig.sorts}
        run.append(k)
        cur = nxt
    if run:
        yield run


def _diagonal_from(gen: Generated, alphabet: Mapping[str, str], names, budget) -> Diagonal:
    sig = gen.signature
    algebra = gen.algebra(budget=budget)
    gens = {x: gen.seed_elements[k][1] for k, x in enumerate(names)}
    reps = gen.terms(_seed_terms(sig, names, alphabet))
    return Diagonal(dict(alphabet), algebra, gens, reps)


def diagonal(sig: Signature, alphabet: Mapping[str, str],
             family: Sequence[tuple[FiniteAlgebra, Mapping[str, int]]],
             budget: int = DEFAULT_BUDGET) -> Diagonal:
    """Subalgebra of the product over ``family`` generated by the X-tuples.

    Its kernel on F(X) is the intersection of the kernels of the assignments in
    ``family``; an empty family gives the all-relation.
    """
    names = sorted(alphabet)
    gen = generate(sig, [], [(alphabet[x], ()) for x in names], budget)
    current = _diagonal_from(gen, alphabet, names, budget)
    algebras = [alg for alg, _ in family]
    for run in _chunks(sig, current.algebra, algebras):
        factors = [current.algebra] + [algebras[k] for k in run]
        seeds = [(alphabet[x], (current.gens[x],) + tuple(int(family[k][1][x]) for k in run)) for x in names]
        gen = generate(sig, factors, seeds, budget)
        current = _diagonal_from(gen, alphabet, names, budget)
    return current


@dataclass
class Factoring:
    """Outcome of testing whether a target factors through a diagonal."""

    functional: bool
    mapping: dict[str, np.ndarray] | None  # element of D -> element of the target, per sort
    witness: Pair | None  # equal in D, different in the target


def factor_many(D: Diagonal, targets: Sequence[tuple[FiniteAlgebra, Mapping[str, int]]],
                budget: int = DEFAULT_BUDGET) -> list[Factoring]:
    """For each target assignment decide whether its kernel contains the kernel of ``D``."""
    sig = D.algebra.signature
    names = sorted(D.alphabet)
    seed_terms = _seed_terms(sig, names, D.alphabet)
    algebras = [alg for alg, _ in targets]
    out: list[Factoring] = [None] * len(targets)
    # one generation per target: a joint product of unrelated targets can be far larger
    for run in ([k] for k in range(len(targets))):
        factors = [D.algebra] + [algebras[k] for k in run]
        seeds = [(D.alphabet[x], (D.gens[x],) + tuple(int(targets[k][1][x]) for k in run)) for x in names]
        gen = generate(sig, factors, seeds, budget)
        terms = None
        for col, k in enumerate(run, start=1):
            mapping: dict[str, np.ndarray] = {}
            witness = None
            for s in sig.sorts:
                comps = gen.comps[s]
                g = np.full(D.algebra.size(s), -1, dtype=np.int64)
                first: dict[int, int] = {}
                for e in range(comps.shape[0]):
                    d, h = int(comps[e, 0]), int(comps[e, col])
                    if g[d] == -1:
                        g[d] = h
                        first[d] = e
                    elif g[d] != h and witness is None:
                        if terms is None:
                            terms = gen.terms(seed_terms)
                        witness = (terms[s][first[d]], terms[s][e])
                mapping[s] = g
            if witness is None:
                out[k] = Factoring(True, mapping, None)
            else:
                out[k] = Factoring(False, None, witness)
    return out


def factors_through(D: Diagonal, target: FiniteAlgebra, assignment: Mapping[str, int],
                    budget: int = DEFAULT_BUDGET) -> Factoring:
    return factor_many(D, [(target, assignment)], budget)[0]


def kernel_included(D1: Diagonal, D2: Diagonal, budget: int = DEFAULT_BUDGET) -> Factoring:
    """``ker D1 <= ker D2``; on failure the witness is equal under D1 and separated by D2."""
    return factors_through(D1, D2.algebra, D2.gens, budget)


# -- closed congruences ---------------------------------------------------------------

@dataclass
class ClosedCongruence:
    """The congruence ``ker S`` on F(X) for a witness set S of assignments."""

    alphabet: dict[str, str]
    family: list[tuple[FiniteAlgebra, dict[str, int]]]
    diagonal: Diagonal

    def contains(self, pair: Pair) -> bool:
        return self.diagonal.contains(pair)

    def presentation(self, budget: int = DEFAULT_BUDGET) -> EquationSystem:
        """Finitely many pairs generating this congruence in any variety containing the family."""
        D = self.diagonal
        sig = D.algebra.signature
        pairs: list[Pair] = []
        for x in sorted(self.alphabet):
            r = D.reps[self.alphabet[x]][D.gens[x]]
            if r != Var(x, self.alphabet[x]):
                pairs.append((Var(x, self.alphabet[x]), r))
        for name, t in sig.ops:
            table = D.algebra.tables[name]
            if table.size > budget:
                raise BudgetExceeded(f"presentation of {name!r}", table.size, budget)
            for idx in itertools.product(*(range(n) for n in table.shape)):
                lhs = App(name, tuple(D.reps[s][i] for s, i in zip(t.args, idx)), t.result)
                rhs = D.reps[t.result][int(table[idx])]
                if lhs != rhs:
                    pairs.append((lhs, rhs))
        return EquationSystem.of(self.alphabet, pairs)


def kernel_of(sig: Signature, alphabet: Mapping[str, str],
              family: Sequence[tuple[FiniteAlgebra, Mapping[str, int]]],
              budget: int = DEFAULT_BUDGET) -> ClosedCongruence:
    fam = [(alg, {x: int(v) for x, v in a.items()}) for alg, a in family]
    return ClosedCongruence(dict(sorted(alphabet.items())), fam, diagonal(sig, alphabet, fam, budget))


def closure_of(T: EquationSystem, H: FiniteAlgebra, budget: int = DEFAULT_BUDGET) -> ClosedCongruence:
    """The closure of ``T`` over ``H`` as a congruence (kernel of all solutions)."""
    sols = solutions(T, H, budget)
    fam = minimal_family(H.signature, T.variables, [(H, a) for a in sols.assignments()], budget)
    return kernel_of(H.signature, T.variables, fam, budget)


@dataclass
class ClosedVerdict:
    closed: bool
    witness: Pair | None  # in the closure over H but not in the congruence
    solutions: int
    exact: bool = True


def is_closed(T, H: FiniteAlgebra, budget: int = DEFAULT_BUDGET, **kwargs) -> ClosedVerdict:
    """Whether a congruence equals its closure over ``H``.

    ``T`` is a :class:`ClosedCongruence` (decided exactly) or an
    :class:`EquationSystem` (see :func:`is_closed_system`).
    """
    if isinstance(T, EquationSystem):
        return is_closed_system(T, H, budget=budget, **kwargs)
    D = T.diagonal
    names, rows = all_assignments(H, T.alphabet, budget)
    targets = [(H, {x: int(v) for x, v in zip(names, row)}) for row in rows]
    results = factor_many(D, targets, budget) if targets else []
    sols = [r.mapping for r in results if r.functional]
    sig = H.signature
    for s in sig.sorts:
        n = D.algebra.size(s)
        if n < 2:
            continue
        cols = np.stack([g[s] for g in sols], axis=1) if sols else np.zeros((n, 0), dtype=np.int64)
        seen: dict[bytes, int] = {}
        for e in range(n):
            key = cols[e].tobytes()
            if key in seen:
                return ClosedVerdict(False, (D.reps[s][seen[key]], D.reps[s][e]), len(sols))
            seen[key] = e
    return ClosedVerdict(True, None, len(sols))


def _congruence_closure(terms: Sequence[Term], pairs: Sequence[Pair]) -> dict[Term, Term]:
    """Classes of the congruence generated by ``pairs`` on the absolutely free algebra.

    ``terms`` must be closed under subterms; returns a representative per term.
    """
    parent = {t: t for t in terms}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb, key=str)] = min(ra, rb, key=str)
            return True
        return False

    for a, b in pairs:
        union(a, b)
    apps = [t for t in terms if isinstance(t, App)]
    changed = True
    while changed:
        changed = False
        sig_table: dict = {}
        for t in apps:
            key = (t.op, tuple(find(a) for a in t.args))
            other = sig_table.setdefault(key, t)
            if other is not t and union(other, t):
                changed = True
    return {t: find(t) for t in terms}


def _subterms(t: Term, into: set) -> None:
    if t in into:
        return
    into.add(t)
    if isinstance(t, App):
        for a in t.args:
            _subterms(a, into)


def is_closed_system(T: EquationSystem, H: FiniteAlgebra, depth: int = 2,
                     budget: int = DEFAULT_BUDGET, identities: Sequence = ()) -> ClosedVerdict:
    """Bounded check for a finite system in a variety without identities.

    Compares, on all terms of depth <= ``depth``, the closure of ``T`` over ``H``
    with the congruence generated by ``T`` in the absolutely free algebra.
    """
    if identities:
        raise NotImplementedError("closedness of finite systems is only decided for varieties without identities")
    sig = H.signature
    frag = list(enumerate_terms(sig, T.variables, depth))
    universe: set = set()
    for t in frag:
        _subterms(t, universe)
    for a, b in T.pairs:
        _subterms(a, universe)
        _subterms(b, universe)
    classes = _congruence_closure(sorted(universe, key=lambda t: (t.depth, str(t))), T.pairs)
    sols = solutions(T, H, budget)
    env = {x: sols.rows[:, k] for k, x in enumerate(sols.names)}
    values = {t: np.broadcast_to(eval_vec(H, t, env), (len(sols),)).tobytes() for t in frag}
    first: dict = {}
    for t in frag:
        key = (t.sort, values[t])
        if key in first:
            u = first[key]
            if classes[u] != classes[t]:
                return ClosedVerdict(False, (u, t), len(sols), exact=False)
        else:
            first[key] = t
    return ClosedVerdict(True, None, len(sols), exact=False)


# -- comparing closures ---------------------------------------------------------------

@dataclass
class ClosureComparison:
    equal: bool
    witness: Pair | None = None
    # which closure contains the witness: 1 -> over H1 only, 2 -> over H2 only
    side: int | None = None


def minimal_family(sig: Signature, alphabet: Mapping[str, str],
                   family: Sequence[tuple[FiniteAlgebra, Mapping[str, int]]],
                   budget: int = DEFAULT_BUDGET) -> list[tuple[FiniteAlgebra, dict[str, int]]]:
    """A subfamily with the same kernel intersection and no redundant member.

    Members with equal kernels are merged; a member whose kernel strictly
    contains another member's kernel is dropped.
    """
    singles: list[tuple[tuple[FiniteAlgebra, dict[str, int]], Diagonal]] = []
    seen: set = set()
    for alg, a in family:
        member = (alg, {x: int(v) for x, v in a.items()})
        D = diagonal(sig, alphabet, [member], budget)
        k = D.key()
        if k not in seen:
            seen.add(k)
            singles.append((member, D))
    redundant = [False] * len(singles)
    for j, (_, Dj) in enumerate(singles):
        others = [i for i in range(len(singles)) if i != j and not redundant[i]]
        results = factor_many(Dj, [singles[i][0] for i in others], budget)
        for i, r in zip(others, results):
            if r.functional:
                redundant[i] = True
    return [m for (m, _), r in zip(singles, redundant) if not r]


def _fits(sig: Signature, algebras: Sequence[FiniteAlgebra]) -> bool:
    return len(list(_chunks(sig, None, algebras))) <= 1


def _joint_compare(sig, alphabet, fam1, fam2, budget) -> ClosureComparison:
    """Compare two kernels through the subalgebra generated in the joint product.

    The kernels are equal iff the joint subalgebra is no larger than either
    side. Generation stops once a sort outgrows the smaller side, at which
    point two found elements must agree on one side and differ on the other.
    """
    names = sorted(alphabet)
    sizes = []
    for fam in (fam1, fam2):
        seeds = [(alphabet[x], tuple(int(a[x]) for _, a in fam)) for x in names]
        g = generate(sig, [alg for alg, _ in fam], seeds, budget)
        sizes.append({s: g.size(s) for s in sig.sorts})
    limit = max(min(sizes[0][s], sizes[1][s]) for s in sig.sorts) + 1
    fam = list(fam1) + list(fam2)
    k1 = len(fam1)
    seeds = [(alphabet[x], tuple(int(a[x]) for _, a in fam)) for x in names]
    gen = generate(sig, [alg for alg, _ in fam], seeds, budget, limit=limit)
    for s in sig.sorts:
        comps = gen.comps[s]
        for side, own, other in ((1, comps[:, :k1], comps[:, k1:]), (2, comps[:, k1:], comps[:, :k1])):
            first: dict[bytes, int] = {}
            for e in range(comps.shape[0]):
                f = first.setdefault(own[e].tobytes(), e)
                if f != e and not np.array_equal(other[f], other[e]):
                    terms = gen.terms(_seed_terms(sig, names, alphabet))
                    return ClosureComparison(False, (terms[s][f], terms[s][e]), side)
    if not gen.complete:  # pragma: no cover - a collision always exists past the limit
        raise AssertionError("joint generation stopped without a separating pair")
    return ClosureComparison(True)


def closure_equal(T: EquationSystem, H1: FiniteAlgebra, H2: FiniteAlgebra,
                  budget: int = DEFAULT_BUDGET) -> ClosureComparison:
    """Whether the closures of ``T`` over ``H1`` and over ``H2`` coincide (exact)."""
    sig = H1.signature
    X = T.variables
    fam1 = minimal_family(sig, X, [(H1, a) for a in solutions(T, H1, budget).assignments()], budget)
    fam2 = minimal_family(sig, X, [(H2, a) for a in solutions(T, H2, budget).assignments()], budget)
    if _fits(sig, [alg for alg, _ in fam1 + fam2]):
        return _joint_compare(sig, X, fam1, fam2, budget)
    D1 = diagonal(sig, X, fam1, budget)
    D2 = diagonal(sig, X, fam2, budget)
    fwd = kernel_included(D1, D2, budget)
    if not fwd.functional:
        return ClosureComparison(False, fwd.witness, 1)
    back = kernel_included(D2, D1, budget)
    if not back.functional:
        return ClosureComparison(False, back.witness, 2)
    return ClosureComparison(True)


EQUIVALENT_UP_TO_BOUND = "EQUIVALENT_UP_TO_BOUND"
NOT_EQUIVALENT = "NOT_EQUIVALENT"


@dataclass
class GeomVerdict:
    verdict: str
    max_generators: int
    alphabets_checked: int = 0
    kernels_checked: int = 0
    alphabet: dict[str, str] | None = None
    system: EquationSystem | None = None
    pair: Pair | None = None
    # the witness pair lies in the closure of ``system`` over this algebra only
    closed_over: int | None = None

    @property
    def equivalent(self) -> bool:
        return self.verdict == EQUIVALENT_UP_TO_BOUND


def variable_names(sig: Signature, counts: Mapping[str, int]) -> dict[str, str]:
    """Canonical alphabet: ``x1, x2, ...`` for the first sort, ``y1, ...`` for the second, and so on."""
    letters = "xyzuvwpqrst"
    out = {}
    for i, s in enumerate(sig.sorts):
        prefix = letters[i] if i < len(letters) else f"s{i}_"
        for k in range(counts.get(s, 0)):
            out[f"{prefix}{k + 1}"] = s
    return out


def alphabets_up_to(sig: Signature, max_generators: int) -> list[dict[str, str]]:
    """All canonical alphabets with at most ``max_generators`` variables per sort.

    Ordered by total size, then lexicographically by the per-sort counts.
    The empty alphabet is included only when the signature has constants.
    """
    counts = list(itertools.product(range(max_generators + 1), repeat=len(sig.sorts)))
    counts.sort(key=lambda c: (sum(c), c))
    out = []
    for c in counts:
        if sum(c) == 0 and not sig.constants:
            continue
        out.append(variable_names(sig, dict(zip(sig.sorts, c))))
    return out


def _unclosed_kernel(sig, X, Ha, Hb, budget, seen):
    """First kernel of a single assignment into Ha that is not closed over Hb."""
    names, rows = all_assignments(Ha, X, budget)
    checked = 0
    for row in rows:
        phi = {x: int(v) for x, v in zip(names, row)}
        cong = kernel_of(sig, X, [(Ha, phi)], budget)
        key = cong.diagonal.key()
        if key in seen:
            continue
        seen.add(key)
        checked += 1
        verdict = is_closed(cong, Hb, budget)
        if not verdict.closed:
            return cong, verdict.witness, checked
    return None, None, checked


def geom_equivalent(H1: FiniteAlgebra, H2: FiniteAlgebra, max_generators: int = 3,
                    budget: int = DEFAULT_BUDGET) -> GeomVerdict:
    """Compare the closed sets of H1 and H2 on every F(X) up to the generator bound.

    Every closed set over H is an intersection of kernels of single
    assignments into H, so it suffices that each such kernel over one algebra
    is closed over the other. A failure yields a finite system (a presentation
    of the kernel) and a pair whose membership in its closure differs.
    """
    sig = H1.signature
    if H2.signature != sig:
        raise ValueError("algebras over different signatures")
    result = GeomVerdict(EQUIVALENT_UP_TO_BOUND, max_generators)
    for X in alphabets_up_to(sig, max_generators):
        result.alphabets_checked += 1
        for side, (Ha, Hb) in enumerate(((H1, H2), (H2, H1)), start=1):
            cong, pair, checked = _unclosed_kernel(sig, X, Ha, Hb, budget, set())
            result.kernels_checked += checked
            if cong is None:
                continue
            system = cong.presentation(budget)
            in_a = closure_member(system, Ha, pair, budget)
            in_b = closure_member(system, Hb, pair, budget)
            if in_a or not in_b:
                raise AssertionError(f"witness {pair} failed re-verification ({in_a}, {in_b})")
            result.verdict = NOT_EQUIVALENT
            result.alphabet = X
            result.system = system
            result.pair = pair
            result.closed_over = 2 if side == 1 else 1
            return result
    return result


def transport_closure(s, T: EquationSystem) -> EquationSystem:
    """Image of the pairs of ``T`` under a fragment bijection from :func:`verbal.induced_s`."""
    fv = freeforms.free_variety(s.variety_id)
    if T.variables != s.alphabet:
        raise TermError(f"system alphabet {T.variables} differs from the fragment alphabet {s.alphabet}")
    pairs = []
    for a, b in T.pairs:
        pairs.append((fv.to_term(s(fv.eval(a))), fv.to_term(s(fv.eval(b)))))
    return EquationSystem(T.alphabet, tuple(pairs))
