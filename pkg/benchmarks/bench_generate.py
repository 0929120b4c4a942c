"""Compare the compiled and numpy generation backends on diagonal subalgebras.

Run: python3 benchmarks/bench_generate.py [--factors 4 6 8] [--size 3] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from verbalg.finite import generate, make_algebra
from verbalg.signature import Signature


def random_algebra(sig, n, rng):
    return make_algebra(sig, {"1": n}, {"mul": rng.integers(0, n, size=(n, n)), "inv": rng.integers(0, n, size=n)})


def run(factors: int, size: int, gens: int, rng, repeat: int):
    sig = Signature.build(["1"], {"mul": (("1", "1"), "1"), "inv": (("1",), "1")})
    algebras = [random_algebra(sig, size, rng) for _ in range(factors)]
    seeds = [("1", tuple(int(rng.integers(0, size)) for _ in range(factors))) for _ in range(gens)]
    out = {}
    for backend in ("numba", "numpy"):
        generate(sig, algebras, seeds, backend=backend)  # warm-up / compile
        best = float("inf")
        for _ in range(repeat):
            t = time.perf_counter()
            g = generate(sig, algebras, seeds, budget=10**7, backend=backend)
            best = min(best, time.perf_counter() - t)
        out[backend] = (best, g)
    a, b = out["numba"][1], out["numpy"][1]
    assert np.array_equal(a.comps["1"], b.comps["1"]) and a.parents == b.parents, "backends disagree"
    return a.size("1"), out["numba"][0], out["numpy"][0]


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--factors", type=int, nargs="+", default=[4, 6, 8])
    p.add_argument("--size", type=int, default=3)
    p.add_argument("--gens", type=int, default=2)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'factors':>8} {'elements':>9} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for k in args.factors:
        n, t_nb, t_np = run(k, args.size, args.gens, rng, args.repeat)
        print(f"{k:>8} {n:>9} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f}")


if __name__ == "__main__":
    main()
