"""Finite many-sorted algebras with possibly empty carriers.

Element ids are small integers per sort (``0 .. n-1``); ``carriers`` only
records display names. An operation table for ``w : (i1..in; j)`` is an int64
array of shape ``(|A_i1|, ..., |A_in|)`` whose entries are ids in ``A_j``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .signature import Identity, Signature, VarietySpec
from .terms import App, Term, TermError, Var

DEFAULT_BUDGET = 10**6

SortedMap = dict  # sort -> tuple of target ids, indexed by source id


class AlgebraError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what}: needs {needed}, budget is {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    signature: Signature
    carriers: Mapping[str, tuple[str, ...]]
    tables: Mapping[str, np.ndarray]

    def __post_init__(self) -> None:
        sig = self.signature
        carriers = {s: tuple(self.carriers.get(s, ())) for s in sig.sorts}
        extra = set(self.carriers) - set(sig.sorts)
        if extra:
            raise AlgebraError(f"carriers for undeclared sorts {sorted(extra)}")
        for s, names in carriers.items():
            if len(set(names)) != len(names):
                raise AlgebraError(f"duplicate element names in carrier of sort {s!r}")
        tables = {}
        for name, t in sig.ops:
            if name not in self.tables:
                raise AlgebraError(f"missing table for operation {name!r}")
            table = np.array(self.tables[name], dtype=np.int64)
            shape = tuple(len(carriers[s]) for s in t.args)
            if table.shape != shape:
                raise AlgebraError(f"table of {name!r} has shape {table.shape}, expected {shape}")
            n_res = len(carriers[t.result])
            if table.size and (table.min() < 0 or table.max() >= n_res):
                if n_res == 0:
                    raise AlgebraError(
                        f"{name!r} maps a nonempty domain into the empty carrier of sort {t.result!r}"
                    )
                raise AlgebraError(f"table of {name!r} has entries outside the carrier of sort {t.result!r}")
            table.setflags(write=False)
            tables[name] = table
        extra_ops = set(self.tables) - set(sig.op_names)
        if extra_ops:
            raise AlgebraError(f"tables for undeclared operations {sorted(extra_ops)}")
        object.__setattr__(self, "carriers", carriers)
        object.__setattr__(self, "tables", tables)

    def size(self, sort: str) -> int:
        return len(self.carriers[sort])

    @property
    def nonempty_sorts(self) -> frozenset[str]:
        """The sorts with a nonempty carrier."""
        return frozenset(s for s, c in self.carriers.items() if c)

    def element(self, sort: str, name: str) -> int:
        try:
            return self.carriers[sort].index(name)
        except ValueError:
            raise AlgebraError(f"{name!r} is not an element of sort {sort!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (
            self.signature == other.signature
            and dict(self.carriers) == dict(other.carriers)
            and all(np.array_equal(self.tables[o], other.tables[o]) for o in self.signature.op_names)
        )

    def same_tables(self, other: "FiniteAlgebra") -> bool:
        """Equal carrier sizes and equal tables, ignoring element names."""
        return all(self.size(s) == other.size(s) for s in self.signature.sorts) and all(
            np.array_equal(self.tables[o], other.tables[o]) for o in self.signature.op_names
        )

    __hash__ = None


def make_algebra(sig: Signature, carriers: Mapping[str, Sequence[str] | int],
                 ops: Mapping[str, object]) -> FiniteAlgebra:
    """Build an algebra from carrier names (or sizes) and per-op tables or callables.

    A callable receives element ids and returns an element id.
    """
    names = {}
    for s in sig.sorts:
        c = carriers.get(s, ())
        names[s] = tuple(str(i) for i in range(c)) if isinstance(c, int) else tuple(c)
    tables = {}
    for op, t in sig.ops:
        spec = ops[op]
        shape = tuple(len(names[s]) for s in t.args)
        if callable(spec):
            table = np.zeros(shape, dtype=np.int64)
            for idx in itertools.product(*(range(n) for n in shape)):
                table[idx] = spec(*idx)
        else:
            table = np.array(spec, dtype=np.int64).reshape(shape)
        tables[op] = table
    return FiniteAlgebra(sig, names, tables)


def terminal_algebra(sig: Signature) -> FiniteAlgebra:
    """One element per sort; every table is constantly 0."""
    return FiniteAlgebra(
        sig,
        {s: ("e",) for s in sig.sorts},
        {name: np.zeros((1,) * t.arity, dtype=np.int64) for name, t in sig.ops},
    )


# -- evaluation ---------------------------------------------------------------

def eval_term(alg: FiniteAlgebra, t: Term, assignment: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            value = assignment[t.name]
        except KeyError:
            raise TermError(f"unbound variable {t.name!r}") from None
        if not 0 <= value < alg.size(t.sort):
            raise AlgebraError(f"{t.name} -> {value} lies outside the carrier of sort {t.sort!r}")
        return int(value)
    table = alg.tables[t.op]
    return int(table[tuple(eval_term(alg, a, assignment) for a in t.args)])


def eval_vec(alg: FiniteAlgebra, t: Term, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate ``t`` on broadcastable arrays of element ids (one per variable)."""
    if isinstance(t, Var):
        try:
            return np.asarray(env[t.name])
        except KeyError:
            raise TermError(f"unbound variable {t.name!r}") from None
    table = alg.tables[t.op]
    if not t.args:
        return np.asarray(table[()])
    return table[tuple(eval_vec(alg, a, env) for a in t.args)]


def count_assignments(alg: FiniteAlgebra, alphabet: Mapping[str, str]) -> int:
    return math.prod(alg.size(s) for s in alphabet.values())


def all_assignments(alg: FiniteAlgebra, alphabet: Mapping[str, str],
                    budget: int = DEFAULT_BUDGET) -> tuple[tuple[str, ...], np.ndarray]:
    """Every assignment of ``alphabet`` into ``alg`` as rows of an array.

    Columns follow variable names in sorted order; rows are lexicographic
    (first variable slowest).
    """
    names = tuple(sorted(alphabet))
    n = count_assignments(alg, alphabet)
    if n > budget:
        raise BudgetExceeded("assignments", n, budget)
    sizes = [alg.size(alphabet[x]) for x in names]
    if not names:
        return names, np.zeros((1, 0), dtype=np.int64)
    if n == 0:
        return names, np.zeros((0, len(names)), dtype=np.int64)
    grid = np.indices(sizes, dtype=np.int64).reshape(len(names), -1).T
    return names, np.ascontiguousarray(grid)


def identity_violation(alg: FiniteAlgebra, identity: Identity,
                       budget: int = DEFAULT_BUDGET) -> dict[str, int] | None:
    """First assignment (lexicographic) where the two sides differ, else None."""
    names, rows = all_assignments(alg, identity.variables, budget)
    if rows.shape[0] == 0:
        return None
    env = {x: rows[:, k] for k, x in enumerate(names)}
    lhs = np.broadcast_to(eval_vec(alg, identity.lhs, env), rows.shape[:1])
    rhs = np.broadcast_to(eval_vec(alg, identity.rhs, env), rows.shape[:1])
    bad = np.flatnonzero(lhs != rhs)
    if bad.size == 0:
        return None
    return {x: int(rows[bad[0], k]) for k, x in enumerate(names)}


def satisfies_identity(alg: FiniteAlgebra, identity: Identity, budget: int = DEFAULT_BUDGET) -> bool:
    return identity_violation(alg, identity, budget) is None


def variety_violation(alg: FiniteAlgebra, v: VarietySpec,
                      budget: int = DEFAULT_BUDGET) -> tuple[int, dict[str, int]] | None:
    for k, ident in enumerate(v.identities):
        bad = identity_violation(alg, ident, budget)
        if bad is not None:
            return k, bad
    return None


def in_variety(alg: FiniteAlgebra, v: VarietySpec, budget: int = DEFAULT_BUDGET) -> bool:
    return variety_violation(alg, v, budget) is None


# -- homomorphisms ------------------------------------------------------------

def _map_arrays(phi: Mapping[str, Sequence[int]], A: FiniteAlgebra, B: FiniteAlgebra) -> dict | None:
    out = {}
    for s in A.signature.sorts:
        arr = np.asarray(phi.get(s, ()), dtype=np.int64).reshape(-1)
        if arr.shape[0] != A.size(s):
            return None
        if arr.size and (arr.min() < 0 or arr.max() >= B.size(s)):
            return None
        out[s] = arr
    return out


def homomorphism_violation(sig: Signature, phi: Mapping[str, Sequence[int]], A: FiniteAlgebra,
                           B: FiniteAlgebra):
    """``None`` if ``phi`` is a homomorphism, else ``(op, argument ids in A)``.

    A map that is not total into B's carriers yields ``("<map>", sort)``.
    """
    arrays = _map_arrays(phi, A, B)
    if arrays is None:
        for s in sig.sorts:
            arr = np.asarray(phi.get(s, ()), dtype=np.int64).reshape(-1)
            if arr.shape[0] != A.size(s) or (arr.size and (arr.min() < 0 or arr.max() >= B.size(s))):
                return ("<map>", s)
    for name, t in sig.ops:
        ta = A.tables[name]
        if ta.size == 0:
            continue
        grid = np.indices(ta.shape, dtype=np.int64) if t.arity else ()
        lhs = arrays[t.result][ta]
        rhs = B.tables[name][tuple(arrays[s][grid[j]] for j, s in enumerate(t.args))]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            return (name, tuple(int(i) for i in bad[0]))
    return None


def is_homomorphism(sig: Signature, phi: Mapping[str, Sequence[int]], A: FiniteAlgebra,
                    B: FiniteAlgebra) -> bool:
    return homomorphism_violation(sig, phi, A, B) is None


def is_embedding(sig: Signature, phi: Mapping[str, Sequence[int]], A: FiniteAlgebra,
                 B: FiniteAlgebra) -> bool:
    if not is_homomorphism(sig, phi, A, B):
        return False
    return all(len(set(phi[s])) == A.size(s) for s in sig.sorts)


def enumerate_homs(sig: Signature, A: FiniteAlgebra, B: FiniteAlgebra,
                   budget: int = DEFAULT_BUDGET) -> list[SortedMap]:
    """All homomorphisms A -> B by brute force over sorted maps, lexicographic."""
    if not A.nonempty_sorts <= B.nonempty_sorts:
        return []
    sorts = sig.sorts
    total = math.prod(B.size(s) ** A.size(s) for s in sorts)
    if total > budget:
        raise BudgetExceeded("sorted maps", total, budget)
    per_sort = [list(itertools.product(range(B.size(s)), repeat=A.size(s))) for s in sorts]
    homs = []
    for choice in itertools.product(*per_sort):
        phi = dict(zip(sorts, choice))
        if homomorphism_violation(sig, phi, A, B) is None:
            homs.append(phi)
    return homs


# -- generation inside products ----------------------------------------------

@dataclass
class Generated:
    """Subalgebra of ``factors[0] x ... x factors[K-1]`` generated by seeds.

    Elements of each sort are numbered in discovery order. ``comps[s][e]``
    holds the K component ids of element ``e``; ``parents[s][e]`` is
    ``("seed", q)`` or ``(op, child ids)``.
    """

    signature: Signature
    factors: tuple
    comps: dict[str, np.ndarray]
    parents: dict[str, list]
    seed_elements: list[tuple[str, int]]
    order: list = field(default_factory=list)  # (sort, id) in global discovery order
    complete: bool = True  # false when stopped early by an element limit

    def size(self, sort: str) -> int:
        return self.comps[sort].shape[0]

    def total(self) -> int:
        return sum(self.size(s) for s in self.signature.sorts)

    def terms(self, seed_terms: Sequence[Term]) -> dict[str, list[Term]]:
        """One term reaching each element, built from the parent records."""
        out: dict[str, list] = {s: [None] * self.size(s) for s in self.signature.sorts}
        for s, e in self.order:
            tag, rest = self.parents[s][e]
            if tag == "seed":
                out[s][e] = seed_terms[rest]
            else:
                args = tuple(out[cs][c] for cs, c in zip(self.signature.op(tag).args, rest))
                out[s][e] = App(tag, args, s)
        return out

    def table(self, op: str, budget: int = DEFAULT_BUDGET) -> np.ndarray:
        """Operation table of the generated subalgebra over its own element ids."""
        t = self.signature.op(op)
        shape = tuple(self.size(s) for s in t.args)
        n = math.prod(shape)
        if n > budget:
            raise BudgetExceeded(f"table of {op!r}", n, budget)
        keys, ids = self._lookup(t.result)
        if n == 0:
            return np.zeros(shape, dtype=np.int64)
        grid = np.indices(shape, dtype=np.int64).reshape(len(shape), -1) if shape else np.zeros((0, 1), np.int64)
        code = np.zeros(grid.shape[1], dtype=np.int64)
        radix = 1
        for k, alg in enumerate(self.factors):
            vals = alg.tables[op][tuple(self.comps[s][grid[j], k] for j, s in enumerate(t.args))]
            code += vals * radix
            radix *= alg.size(t.result)
        return ids[np.searchsorted(keys, code)].reshape(shape)

    def algebra(self, names: Sequence[str] | None = None, budget: int = DEFAULT_BUDGET) -> FiniteAlgebra:
        carriers = {s: tuple(f"d{e}" for e in range(self.size(s))) for s in self.signature.sorts}
        tables = {name: self.table(name, budget) for name in self.signature.op_names}
        return FiniteAlgebra(self.signature, carriers, tables)

    def _lookup(self, sort: str) -> tuple[np.ndarray, np.ndarray]:
        """Sorted element codes of ``sort`` and the element id of each."""
        radix = np.ones(len(self.factors), dtype=np.int64)
        for k in range(1, len(self.factors)):
            radix[k] = radix[k - 1] * self.factors[k - 1].size(sort)
        comps = self.comps[sort]
        codes = comps @ radix if comps.shape[1] else np.zeros(comps.shape[0], dtype=np.int64)
        order = np.argsort(codes, kind="stable")
        return codes[order], order.astype(np.int64)


_MAX_CODE = 2**62
_MERGE_CELLS = 1 << 16  # largest merged operation table
_DIRECT_CODES = 1 << 21  # code range indexed without hashing


@dataclass
class _Block:
    """Consecutive factors fused into one; element index is mixed radix, first factor fastest."""

    sizes: dict[str, int]
    tables: dict[str, np.ndarray]

    @classmethod
    def of(cls, sig: Signature, algs: Sequence[FiniteAlgebra]) -> "_Block":
        sizes = {s: math.prod(a.size(s) for a in algs) for s in sig.sorts}
        tables = {}
        for name, t in sig.ops:
            shape = tuple(sizes[s] for s in t.args)
            if len(algs) == 1:
                tables[name] = np.array(algs[0].tables[name], dtype=np.int64, order="C")
                continue
            n = math.prod(shape)
            out = np.zeros(n, dtype=np.int64)
            if n:
                grid = np.indices(shape, dtype=np.int64).reshape(len(shape), -1) if shape else np.zeros((0, 1), np.int64)
                rem = [grid[j].copy() for j in range(t.arity)]
                r = 1
                for a in algs:
                    idx = []
                    for j, s in enumerate(t.args):
                        idx.append(rem[j] % a.size(s))
                        rem[j] //= a.size(s)
                    out += a.tables[name][tuple(idx)] * r
                    r *= a.size(t.result)
            tables[name] = out.reshape(shape)
        return cls(sizes, tables)


def _merge_blocks(sig: Signature, factors: Sequence[FiniteAlgebra]) -> list[_Block]:
    """Fuse runs of factors so each generation step needs fewer table lookups."""
    blocks, run, cur = [], [], {s: 1 for s in sig.sorts}

    def cells(sz):
        return max([math.prod(sz[s] for s in t.args) for _, t in sig.ops] + [1])

    for alg in factors:
        nxt = {s: cur[s] * max(alg.size(s), 1) for s in sig.sorts}
        if run and cells(nxt) > _MERGE_CELLS:
            blocks.append(_Block.of(sig, run))
            run, nxt = [], {s: max(alg.size(s), 1) for s in sig.sorts}
        run.append(alg)
        cur = nxt
    if run:
        blocks.append(_Block.of(sig, run))
    return blocks


def generate(sig: Signature, factors: Sequence[FiniteAlgebra], seeds: Sequence[tuple[str, Sequence[int]]],
             budget: int = DEFAULT_BUDGET, backend: str | None = None,
             limit: int | None = None) -> Generated:
    """Generate the subalgebra of the product of ``factors`` containing ``seeds``.

    Each seed is ``(sort, component ids)``. Constants are added automatically
    after the seeds. Raises :class:`BudgetExceeded` when more than ``budget``
    elements would be produced. With ``limit``, generation instead stops as soon
    as some sort would exceed ``limit`` elements and returns what was found so
    far, with ``complete`` false.
    """
    factors = tuple(factors)
    K = len(factors)
    sorts = sig.sorts
    sidx = {s: i for i, s in enumerate(sorts)}
    n_sorts = len(sorts)
    sizes = np.zeros((max(K, 1), n_sorts), dtype=np.int64)
    radix = np.zeros((n_sorts, max(K, 1)), dtype=np.int64)
    totals = []
    for s in sorts:
        r = 1
        for k, alg in enumerate(factors):
            sizes[k, sidx[s]] = alg.size(s)
            radix[sidx[s], k] = r
            r *= alg.size(s)
        if r >= _MAX_CODE:
            raise BudgetExceeded(f"product carrier of sort {s!r} (int64 encoding)", r, _MAX_CODE)
        totals.append(r)
    if K == 0:
        # empty product: one element per sort, code 0
        blocks = [_Block.of(sig, (terminal_algebra(sig),))]
    else:
        blocks = _merge_blocks(sig, factors)
    Ke = len(blocks)
    sizes_e = np.array([[b.sizes[s] for s in sorts] for b in blocks], dtype=np.int64)
    radix_e = np.zeros((n_sorts, Ke), dtype=np.int64)
    for si, s in enumerate(sorts):
        r = 1
        for k, b in enumerate(blocks):
            radix_e[si, k] = r
            r *= b.sizes[s]

    ops = list(sig.ops)
    A = max([t.arity for _, t in ops] + [1])
    op_arity = np.array([t.arity for _, t in ops], dtype=np.int64)
    op_args = np.zeros((len(ops), A), dtype=np.int64)
    op_res = np.array([sidx[t.result] for _, t in ops], dtype=np.int64)
    tab_off = np.zeros((len(ops), Ke), dtype=np.int64)
    tab_stride = np.zeros((len(ops), Ke, A), dtype=np.int64)
    chunks = []
    offset = 0
    for o, (name, t) in enumerate(ops):
        for j, s in enumerate(t.args):
            op_args[o, j] = sidx[s]
        for k, b in enumerate(blocks):
            table = b.tables[name]
            tab_off[o, k] = offset
            stride = 1
            for j in range(t.arity - 1, -1, -1):
                tab_stride[o, k, j] = stride
                stride *= table.shape[j]
            chunks.append(table.reshape(-1))
            offset += table.size
    tab = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
    if tab.size == 0:
        tab = np.zeros(1, dtype=np.int64)

    seed_sort, seed_code, seed_op = [], [], []
    for s, comps in seeds:
        comps = tuple(comps) if K else (0,)
        code = sum(int(c) * int(radix[sidx[s], k]) for k, c in enumerate(comps))
        seed_sort.append(sidx[s])
        seed_code.append(code)
        seed_op.append(-1)
    for o, (name, t) in enumerate(ops):
        if t.arity == 0:
            code = sum(int(b.tables[name][()]) * int(radix_e[op_res[o], k]) for k, b in enumerate(blocks))
            seed_sort.append(int(op_res[o]))
            seed_code.append(code)
            seed_op.append(o)
    seed_sort = np.array(seed_sort, dtype=np.int64)
    seed_code = np.array(seed_code, dtype=np.int64)
    seed_op = np.array(seed_op, dtype=np.int64)

    ceiling = min(budget, max(totals + [1]))
    if limit is not None:
        ceiling = min(ceiling, max(int(limit), 1))
    cap = min(64, ceiling)
    complete = True
    while True:
        status, count, members, el_code, el_sort, par_op, par_arg, seed_pool = _kernels.generate_codes(
            n_sorts, Ke, sizes_e, radix_e, op_arity, op_args, op_res, tab, tab_off, tab_stride,
            seed_sort, seed_code, seed_op, cap, backend=backend,
            direct=max(totals + [1]) if max(totals + [1]) <= _DIRECT_CODES else 0,
        )
        if status == _kernels.OK:
            break
        if cap >= ceiling and limit is not None and cap == max(int(limit), 1):
            complete = False
            break
        if cap >= ceiling:
            raise BudgetExceeded("generated subalgebra elements", int(count.sum()) + 1, budget)
        cap = min(cap * 8, ceiling)

    local = {}
    comps: dict[str, np.ndarray] = {}
    parents: dict[str, list] = {}
    for si, s in enumerate(sorts):
        ms = members[si, : count[si]]
        for e, m in enumerate(ms):
            local[int(m)] = (s, e)
        codes = el_code[ms]
        if K:
            comps[s] = np.stack([(codes // radix[si, k]) % max(sizes[k, si], 1) for k in range(K)], axis=1)
        else:
            comps[s] = np.zeros((len(ms), 0), dtype=np.int64)
    order = sorted(local)
    for si, s in enumerate(sorts):
        plist = []
        for m in members[si, : count[si]]:
            o = int(par_op[m])
            if int(par_arg[m, 0]) <= -2:
                q = -2 - int(par_arg[m, 0])
                plist.append(("seed", q))
            else:
                name, t = ops[o]
                plist.append((name, tuple(local[int(par_arg[m, j])][1] for j in range(t.arity))))
        parents[s] = plist
    seed_elements = [local.get(int(m)) for m in seed_pool]
    return Generated(sig, factors, comps, parents, seed_elements, [local[m] for m in order], complete)


def generated_subalgebra(sig: Signature, A: FiniteAlgebra, seed: Mapping[str, Iterable[int]],
                         budget: int = DEFAULT_BUDGET) -> tuple[FiniteAlgebra, SortedMap]:
    """Least subalgebra containing ``seed`` and all constants, with its inclusion map.

    The subalgebra keeps A's element names and their relative order.
    """
    seeds = [(s, (int(a),)) for s in sig.sorts for a in sorted(set(seed.get(s, ())))]
    for s, (a,) in seeds:
        if not 0 <= a < A.size(s):
            raise AlgebraError(f"seed element {a} outside the carrier of sort {s!r}")
    gen = generate(sig, [A], seeds, budget)
    keep = {s: sorted(int(c) for c in gen.comps[s][:, 0]) for s in sig.sorts}
    position = {s: {a: i for i, a in enumerate(keep[s])} for s in sig.sorts}
    tables = {}
    for name, t in sig.ops:
        sub = A.tables[name][np.ix_(*[keep[s] for s in t.args])] if t.arity else A.tables[name]
        remap = np.vectorize(lambda a, _s=t.result: position[_s][int(a)], otypes=[np.int64])
        tables[name] = remap(sub) if sub.size else np.zeros(sub.shape, dtype=np.int64)
    carriers = {s: tuple(A.carriers[s][a] for a in keep[s]) for s in sig.sorts}
    return FiniteAlgebra(sig, carriers, tables), {s: tuple(keep[s]) for s in sig.sorts}


def product_algebra(sig: Signature, algebras: Sequence[FiniteAlgebra],
                    budget: int = DEFAULT_BUDGET) -> FiniteAlgebra:
    """Direct product; elements are ordered lexicographically (first factor slowest)."""
    algebras = tuple(algebras)
    sizes = {s: tuple(a.size(s) for a in algebras) for s in sig.sorts}
    for s in sig.sorts:
        n = math.prod(sizes[s])
        if n > budget:
            raise BudgetExceeded(f"product carrier of sort {s!r}", n, budget)
    carriers = {
        s: tuple("(" + ",".join(a.carriers[s][i] for a, i in zip(algebras, idx)) + ")"
                 for idx in itertools.product(*(range(n) for n in sizes[s])))
        for s in sig.sorts
    }
    tables = {}
    for name, t in sig.ops:
        shape = tuple(math.prod(sizes[s]) for s in t.args)
        n = math.prod(shape)
        if n > budget:
            raise BudgetExceeded(f"table of {name!r}", n, budget)
        res_shape = sizes[t.result]
        if n == 0:
            tables[name] = np.zeros(shape, dtype=np.int64)
            continue
        grid = np.indices(shape, dtype=np.int64).reshape(len(shape), -1) if shape else np.zeros((0, 1), np.int64)
        per_arg = [np.unravel_index(grid[j], sizes[s]) if sizes[s] else () for j, s in enumerate(t.args)]
        comps = []
        for k, alg in enumerate(algebras):
            comps.append(alg.tables[name][tuple(per_arg[j][k] for j in range(t.arity))]
                         * np.ones(grid.shape[1], dtype=np.int64))
        flat = np.ravel_multi_index(tuple(comps), res_shape) if algebras else np.zeros(grid.shape[1], np.int64)
        tables[name] = flat.reshape(shape)
    return FiniteAlgebra(sig, carriers, tables)
