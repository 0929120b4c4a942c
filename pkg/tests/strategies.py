"""Hypothesis strategies for small finite algebras and systems."""
from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from verbalg.finite import FiniteAlgebra
from verbalg.signature import Signature
from verbalg.terms import App, Var


def algebras(sig: Signature, max_size: int = 3, min_size: int = 1):
    """Arbitrary algebras (no identities) over ``sig``."""

    @st.composite
    def build(draw):
        sizes = {s: draw(st.integers(min_size, max_size)) for s in sig.sorts}
        # an operation with a non-empty domain needs a non-empty result sort
        changed = True
        while changed:
            changed = False
            for _, t in sig.ops:
                if sizes[t.result] == 0 and all(sizes[s] for s in t.args):
                    sizes[t.result] = 1
                    changed = True
        tables = {}
        for name, t in sig.ops:
            shape = tuple(sizes[s] for s in t.args)
            n = int(np.prod(shape)) if shape else 1
            cells = draw(st.lists(st.integers(0, sizes[t.result] - 1), min_size=n, max_size=n)) if n else []
            tables[name] = np.array(cells, dtype=np.int64).reshape(shape)
        carriers = {s: tuple(f"e{k}" for k in range(sizes[s])) for s in sig.sorts}
        return FiniteAlgebra(sig, carriers, tables)

    return build()


def terms(sig: Signature, alphabet: dict, sort: str, max_depth: int = 2):
    """Terms of one sort over ``alphabet``."""
    leaves = [Var(x, s) for x, s in sorted(alphabet.items()) if s == sort]
    leaves += [App(c, (), sort) for c in sig.constants if sig.op(c).result == sort]

    def extend(children_by_sort):
        opts = []
        for name, t in sig.ops:
            if t.result != sort or t.arity == 0:
                continue
            opts.append(st.tuples(*[children_by_sort(s) for s in t.args]).map(
                lambda args, name=name: App(name, tuple(args), sort)))
        return opts

    if max_depth == 0 or not extend(lambda s: st.nothing()):
        return st.sampled_from(leaves) if leaves else st.nothing()
    deeper = extend(lambda s: terms(sig, alphabet, s, max_depth - 1))
    base = [st.sampled_from(leaves)] if leaves else []
    return st.one_of(*(base + deeper))


# -- seeded instances for the acceptance suite -----------------------------------------

INSTANCE_SIGNATURES = [
    (Signature.build(["1"], {"mul": (("1", "1"), "1")}), [{"x1": "1"}, {"x1": "1", "x2": "1"}]),
    (Signature.build(["1", "2"], {"mul": (("1", "1"), "1"), "act": (("1", "2"), "2")}),
     [{"x1": "1", "y1": "2"}, {"y1": "2"}, {"y1": "2", "y2": "2"}]),
    (Signature.build(["1"], {"f": (("1",), "1"), "g": (("1",), "1")}), [{"x1": "1", "x2": "1"}]),
    (Signature.build(["1"], {"c": ((), "1"), "mul": (("1", "1"), "1")}), [{"x1": "1"}, {"x1": "1", "x2": "1"}]),
]


def random_algebra(sig: Signature, rng: np.random.Generator, max_size: int = 3, sizes=None) -> FiniteAlgebra:
    if sizes is None:
        sizes = {s: int(rng.integers(1 if k == 0 else 0, max_size + 1)) for k, s in enumerate(sig.sorts)}
    sizes = dict(sizes)
    tables = {}
    for name, t in sig.ops:
        if sizes[t.result] == 0 and all(sizes[s] for s in t.args):
            sizes[t.result] = 1
    for name, t in sig.ops:
        shape = tuple(sizes[s] for s in t.args)
        tables[name] = rng.integers(0, max(sizes[t.result], 1), size=shape).astype(np.int64)
    carriers = {s: tuple(f"e{k}" for k in range(sizes[s])) for s in sig.sorts}
    return FiniteAlgebra(sig, carriers, tables)


def random_term(sig: Signature, alphabet: dict, sort: str, depth: int, rng: np.random.Generator):
    leaves = [Var(x, s) for x, s in sorted(alphabet.items()) if s == sort]
    leaves += [App(c, (), sort) for c in sig.constants if sig.op(c).result == sort]
    ops = [(n, t) for n, t in sig.ops if t.result == sort and t.arity
           and all(any(v == a for v in alphabet.values()) or a == sort for a in t.args)]
    if depth == 0 or not ops or (leaves and rng.random() < 0.35):
        if not leaves:
            return None
        return leaves[int(rng.integers(len(leaves)))]
    name, t = ops[int(rng.integers(len(ops)))]
    args = [random_term(sig, alphabet, a, depth - 1, rng) for a in t.args]
    if any(a is None for a in args):
        return leaves[int(rng.integers(len(leaves)))] if leaves else None
    return App(name, tuple(args), sort)


def random_pairs(sig: Signature, alphabet: dict, rng: np.random.Generator, max_pairs: int = 3, depth: int = 2):
    pairs = []
    sorts = sorted(set(alphabet.values()))
    for _ in range(int(rng.integers(0, max_pairs + 1))):
        s = sorts[int(rng.integers(len(sorts)))]
        a, b = random_term(sig, alphabet, s, depth, rng), random_term(sig, alphabet, s, depth, rng)
        if a is not None and b is not None:
            pairs.append((a, b))
    return pairs


def relabelled(H: FiniteAlgebra, rng: np.random.Generator) -> FiniteAlgebra:
    """An isomorphic copy with shuffled element ids."""
    sig = H.signature
    perm = {s: rng.permutation(H.size(s)) for s in sig.sorts}
    tables = {}
    for name, t in sig.ops:
        old = H.tables[name]
        new = np.zeros_like(old)
        for idx in np.ndindex(*old.shape):
            new[tuple(perm[s][i] for s, i in zip(t.args, idx))] = perm[t.result][old[idx]]
        tables[name] = new
    return FiniteAlgebra(sig, {s: H.carriers[s] for s in sig.sorts}, tables)
