"""Subalgebra generation kernels.

Elements of a product ``A_0 x ... x A_{K-1}`` (per sort) are encoded as
mixed-radix int64 codes. Generation runs semi-naive rounds: every round
applies each operation to all argument tuples containing at least one element
found in the previous round, so each tuple is visited exactly once.

Two interchangeable backends produce identical output (same discovery order,
same parents):

* ``numba`` -- compiled loops with an open-addressing hash table;
* ``numpy`` -- vectorised batches per (operation, first-new-position).

``VERBALG_BACKEND=numpy`` forces the fallback; the default is numba when it
imports.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    nb = None
    HAVE_NUMBA = False

OK = 0
NEED_CAPACITY = 1
_BATCH = 1 << 18  # tuples per numpy batch


def default_backend() -> str:
    choice = os.environ.get("VERBALG_BACKEND", "").strip().lower()
    if choice in ("numpy", "python", "fallback"):
        return "numpy"
    if choice == "numba" and not HAVE_NUMBA:
        raise RuntimeError("VERBALG_BACKEND=numba but numba is not importable")
    return "numba" if HAVE_NUMBA else "numpy"


def _slot_py(code, mask):
    return code if mask == -1 else _hash(code, mask)


def _hash_py(code, mask):
    # splitmix64-style scramble, kept within int64
    h = (code ^ (code >> 31)) * 0x5BD1E995
    h = h ^ (h >> 29)
    return h & mask


def _generate_py(n_sorts, K, sizes, radix, op_arity, op_args, op_res, tab, tab_off, tab_stride,
                 seed_sort, seed_code, seed_op, cap, direct=0):
    """Reference (numpy) implementation. Same contract as the compiled one."""
    A = op_args.shape[1]
    P = n_sorts * cap
    members = np.full((n_sorts, cap), -1, dtype=np.int64)
    count = np.zeros(n_sorts, dtype=np.int64)
    el_code = np.zeros(P, dtype=np.int64)
    el_sort = np.zeros(P, dtype=np.int64)
    el_comp = np.zeros((P, K), dtype=np.int64)
    par_op = np.full(P, -1, dtype=np.int64)
    par_arg = np.full((P, max(A, 1)), -1, dtype=np.int64)
    seed_pool = np.full(seed_sort.shape[0], -1, dtype=np.int64)
    index = [dict() for _ in range(n_sorts)]
    n_pool = 0

    for q in range(seed_sort.shape[0]):
        s = seed_sort[q]
        c = seed_code[q]
        hit = index[s].get(int(c))
        if hit is None:
            if count[s] >= cap:
                return NEED_CAPACITY, count, members, el_code, el_sort, par_op, par_arg, seed_pool
            m = n_pool
            n_pool += 1
            index[s][int(c)] = m
            el_code[m] = c
            el_sort[m] = s
            for k in range(K):
                el_comp[m, k] = (c // radix[s, k]) % sizes[k, s]
            par_op[m] = seed_op[q]
            par_arg[m, 0] = -2 - q  # seeds mark their own number
            members[s, count[s]] = m
            count[s] += 1
            hit = m
        seed_pool[q] = hit

    old = np.zeros(n_sorts, dtype=np.int64)
    while True:
        cur = count.copy()
        for o in range(op_arity.shape[0]):
            n = op_arity[o]
            if n == 0:
                continue
            res = op_res[o]
            for first in range(n):
                ranges = []
                empty = False
                for j in range(n):
                    s = op_args[o, j]
                    lo, hi = (0, old[s]) if j < first else ((old[s], cur[s]) if j == first else (0, cur[s]))
                    if hi <= lo:
                        empty = True
                        break
                    ranges.append(np.arange(lo, hi, dtype=np.int64))
                if empty:
                    continue
                # blocks along position 0 keep the batch near _BATCH tuples
                inner = 1
                for r in ranges[1:]:
                    inner *= len(r)
                step = max(1, _BATCH // max(inner, 1))
                for b0 in range(0, len(ranges[0]), step):
                    block = [ranges[0][b0:b0 + step]] + ranges[1:]
                    grids = np.meshgrid(*block, indexing="ij")
                    pool_idx = [members[op_args[o, j], grids[j].ravel()] for j in range(n)]
                    codes = np.zeros(pool_idx[0].shape[0], dtype=np.int64)
                    for k in range(K):
                        flat = np.full(codes.shape[0], tab_off[o, k], dtype=np.int64)
                        for j in range(n):
                            flat += el_comp[pool_idx[j], k] * tab_stride[o, k, j]
                        codes += tab[flat] * radix[res, k]
                    _, first_pos = np.unique(codes, return_index=True)
                    first_pos.sort()
                    known = index[res]
                    for pos in first_pos:
                        c = int(codes[pos])
                        if c in known:
                            continue
                        if count[res] >= cap:
                            return NEED_CAPACITY, count, members, el_code, el_sort, par_op, par_arg, seed_pool
                        m = n_pool
                        n_pool += 1
                        known[c] = m
                        el_code[m] = c
                        el_sort[m] = res
                        for k in range(K):
                            el_comp[m, k] = (c // radix[res, k]) % sizes[k, res]
                        par_op[m] = o
                        for j in range(n):
                            par_arg[m, j] = pool_idx[j][pos]
                        members[res, count[res]] = m
                        count[res] += 1
        if np.array_equal(count, cur):
            break
        old = cur
    return OK, count, members, el_code, el_sort, par_op, par_arg, seed_pool


def _binary_block_impl(o, res, K, lo, hi, op_args, tab, tab_off, tab_stride, radix, sizes,
                       members, count, el_code, el_sort, el_comp, par_op, par_arg,
                       ht_key, ht_val, mask, n_pool, cap):
    """Binary operations over one semi-naive range; returns the pool size or -1 when full."""
    s0 = op_args[o, 0]
    s1 = op_args[o, 1]
    row = np.zeros(K, dtype=np.int64)
    n1 = hi[1] - lo[1]
    col = np.empty((n1, K), dtype=np.int64)
    for i1 in range(n1):
        m1 = members[s1, lo[1] + i1]
        for k in range(K):
            col[i1, k] = el_comp[m1, k] * tab_stride[o, k, 1]
    rad = radix[res, :K].copy()
    for i0 in range(lo[0], hi[0]):
        m0 = members[s0, i0]
        for k in range(K):
            row[k] = tab_off[o, k] + el_comp[m0, k] * tab_stride[o, k, 0]
        for i1 in range(n1):
            c = 0
            for k in range(K):
                c += tab[row[k] + col[i1, k]] * rad[k]
            h = _slot(c, mask)
            while ht_key[res, h] != -1 and ht_key[res, h] != c:
                h = (h + 1) & mask
            if ht_key[res, h] != c:
                if count[res] >= cap:
                    return -1
                m = n_pool
                n_pool += 1
                ht_key[res, h] = c
                ht_val[res, h] = m
                el_code[m] = c
                el_sort[m] = res
                for k in range(K):
                    el_comp[m, k] = (c // radix[res, k]) % sizes[k, res]
                par_op[m] = o
                par_arg[m, 0] = m0
                par_arg[m, 1] = members[s1, lo[1] + i1]
                members[res, count[res]] = m
                count[res] += 1
    return n_pool


def _generate_nb_impl(n_sorts, K, sizes, radix, op_arity, op_args, op_res, tab, tab_off, tab_stride,
                      seed_sort, seed_code, seed_op, cap, direct):
    A = op_args.shape[1]
    P = n_sorts * cap
    members = np.full((n_sorts, cap), -1, dtype=np.int64)
    count = np.zeros(n_sorts, dtype=np.int64)
    el_code = np.zeros(P, dtype=np.int64)
    el_sort = np.zeros(P, dtype=np.int64)
    el_comp = np.zeros((P, K), dtype=np.int64)
    par_op = np.full(P, -1, dtype=np.int64)
    par_arg = np.full((P, max(A, 1)), -1, dtype=np.int64)
    seed_pool = np.full(seed_sort.shape[0], -1, dtype=np.int64)
    hcap = 1
    while hcap < 2 * cap:
        hcap *= 2
    if direct > 0:
        # small products: index the table by code, no probing
        hcap = direct
    mask = hcap - 1 if direct == 0 else -1
    ht_key = np.full((n_sorts, hcap), -1, dtype=np.int64)
    ht_val = np.full((n_sorts, hcap), -1, dtype=np.int64)
    n_pool = 0

    for q in range(seed_sort.shape[0]):
        s = seed_sort[q]
        c = seed_code[q]
        h = _slot(c, mask)
        while ht_key[s, h] != -1 and ht_key[s, h] != c:
            h = (h + 1) & mask
        if ht_key[s, h] == c:
            seed_pool[q] = ht_val[s, h]
            continue
        if count[s] >= cap:
            return NEED_CAPACITY, count, members, el_code, el_sort, par_op, par_arg, seed_pool
        m = n_pool
        n_pool += 1
        ht_key[s, h] = c
        ht_val[s, h] = m
        el_code[m] = c
        el_sort[m] = s
        for k in range(K):
            el_comp[m, k] = (c // radix[s, k]) % sizes[k, s]
        par_op[m] = seed_op[q]
        par_arg[m, 0] = -2 - q
        members[s, count[s]] = m
        count[s] += 1
        seed_pool[q] = m

    old = np.zeros(n_sorts, dtype=np.int64)
    lo = np.zeros(max(A, 1), dtype=np.int64)
    hi = np.zeros(max(A, 1), dtype=np.int64)
    idx = np.zeros(max(A, 1), dtype=np.int64)
    while True:
        cur = count.copy()
        for o in range(op_arity.shape[0]):
            n = op_arity[o]
            if n == 0:
                continue
            res = op_res[o]
            for first in range(n):
                empty = False
                for j in range(n):
                    s = op_args[o, j]
                    if j < first:
                        lo[j] = 0
                        hi[j] = old[s]
                    elif j == first:
                        lo[j] = old[s]
                        hi[j] = cur[s]
                    else:
                        lo[j] = 0
                        hi[j] = cur[s]
                    if hi[j] <= lo[j]:
                        empty = True
                if empty:
                    continue
                if n == 2:
                    n_pool = _binary_block(o, res, K, lo, hi, op_args, tab, tab_off, tab_stride, radix,
                                           sizes, members, count, el_code, el_sort, el_comp,
                                           par_op, par_arg, ht_key, ht_val, mask, n_pool, cap)
                    if n_pool < 0:
                        return NEED_CAPACITY, count, members, el_code, el_sort, par_op, par_arg, seed_pool
                    continue
                for j in range(n):
                    idx[j] = lo[j]
                while True:
                    c = 0
                    for k in range(K):
                        flat = tab_off[o, k]
                        for j in range(n):
                            m = members[op_args[o, j], idx[j]]
                            flat += el_comp[m, k] * tab_stride[o, k, j]
                        c += tab[flat] * radix[res, k]
                    h = _slot(c, mask)
                    while ht_key[res, h] != -1 and ht_key[res, h] != c:
                        h = (h + 1) & mask
                    if ht_key[res, h] != c:
                        if count[res] >= cap:
                            return NEED_CAPACITY, count, members, el_code, el_sort, par_op, par_arg, seed_pool
                        m = n_pool
                        n_pool += 1
                        ht_key[res, h] = c
                        ht_val[res, h] = m
                        el_code[m] = c
                        el_sort[m] = res
                        for k in range(K):
                            el_comp[m, k] = (c // radix[res, k]) % sizes[k, res]
                        par_op[m] = o
                        for j in range(n):
                            par_arg[m, j] = members[op_args[o, j], idx[j]]
                        members[res, count[res]] = m
                        count[res] += 1
                    # odometer, last position fastest
                    j = n - 1
                    while j >= 0:
                        idx[j] += 1
                        if idx[j] < hi[j]:
                            break
                        idx[j] = lo[j]
                        j -= 1
                    if j < 0:
                        break
        changed = False
        for s in range(n_sorts):
            if count[s] != cur[s]:
                changed = True
        if not changed:
            break
        old = cur
    return OK, count, members, el_code, el_sort, par_op, par_arg, seed_pool


if HAVE_NUMBA:
    _hash = nb.njit(cache=True)(_hash_py)
    _slot = nb.njit(cache=True)(_slot_py)
    _binary_block = nb.njit(cache=True)(_binary_block_impl)
    _generate_nb = nb.njit(cache=True)(_generate_nb_impl)
else:  # pragma: no cover
    _hash = _hash_py
    _slot = _slot_py
    _binary_block = None
    _generate_nb = None


def generate_codes(n_sorts, K, sizes, radix, op_arity, op_args, op_res, tab, tab_off, tab_stride,
                   seed_sort, seed_code, seed_op, cap, backend=None, direct=0):
    """``direct`` > 0 is the code range when it is small enough to index directly."""
    backend = backend or default_backend()
    fn = _generate_nb if backend == "numba" else _generate_py
    return fn(n_sorts, K, sizes, radix, op_arity, op_args, op_res, tab, tab_off, tab_stride,
              seed_sort, seed_code, seed_op, cap, direct)
