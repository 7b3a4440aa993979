#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Covers the two hot paths: clone-slice closure on 3-element magmas (the
dominant cost of equivalence sweeps) and the hypersubstitution scan over a
computed slice.  Run from the repository root:

    python benchmarks/bench_kernels.py [--magmas N] [--seed S]
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np


def time_closures(backend, magma_tables, repeat=1):
    import hyperq.kernels as K
    from hyperq.algebra import FiniteAlgebra, compute_raw_slice
    from hyperq.syntax import parse_signature

    sig = parse_signature("sig f/2")
    old = K.CloneAccumulator
    K.CloneAccumulator = backend.CloneAccumulator
    try:
        best = float("inf")
        sizes = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            sizes = []
            for table in magma_tables:
                A = FiniteAlgebra("m", 3, sig, (table,))
                raw = compute_raw_slice(A, 2, 100_000)
                sizes.append(len(raw))
            best = min(best, time.perf_counter() - t0)
        return best, sizes
    finally:
        K.CloneAccumulator = old


def time_scans(backend, magma_tables):
    from hyperq.algebra import FiniteAlgebra, compile_term, compute_raw_slice
    from hyperq.syntax import parse_quasi_identity, parse_signature, variables_of_quasi_identity

    sig = parse_signature("sig f/2")
    q = parse_quasi_identity("f(x,y) = f(y,x) -> f(x,f(y,x)) = f(f(x,y),x)", sig)
    var_order = variables_of_quasi_identity(q)
    pl = [compile_term(p.lhs, var_order, sig) for p in q.premises]
    pr = [compile_term(p.rhs, var_order, sig) for p in q.premises]
    cl = compile_term(q.conclusion.lhs, var_order, sig)
    cr = compile_term(q.conclusion.rhs, var_order, sig)

    total = 0.0
    for table in magma_tables:
        A = FiniteAlgebra("m", 3, sig, (table,))
        raw = compute_raw_slice(A, 2, 100_000)
        args_l = (A.np_tables(), np.array([2], dtype=np.int32), 3, len(var_order),
                  raw.defs, pl, pr, cl, cr)
        args_r = (raw.tables, 2, 3, len(var_order), pl, pr, cl, cr)
        t0 = time.perf_counter()
        backend.lhs_scan_axiom(*args_l)
        backend.rhs_scan_axiom(*args_r)
        total += time.perf_counter() - t0
    return total


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--magmas", type=int, default=12, help="random 3-element magmas")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    from hyperq.kernels import get_backend

    try:
        c = get_backend("c")
    except ImportError:
        print("compiled backend not built; run `python setup.py build_ext --inplace`")
        return 1
    py = get_backend("py")

    rng = random.Random(args.seed)
    tables = [tuple(rng.randrange(3) for _ in range(9)) for _ in range(args.magmas)]

    print(f"{args.magmas} random 3-element magmas, seed {args.seed}\n")
    rows = []

    t_c, sizes_c = time_closures(c, tables)
    t_py, sizes_py = time_closures(py, tables)
    assert sizes_c == sizes_py, "backends disagree on slice sizes"
    rows.append(("clone closure (arity 2)", t_c, t_py))

    s_c = time_scans(c, tables)
    s_py = time_scans(py, tables)
    rows.append(("hsub scans (lhs+rhs)", s_c, s_py))

    print(f"{'kernel':<28}{'compiled':>12}{'pure':>12}{'speedup':>10}")
    for name, tc, tp in rows:
        print(f"{name:<28}{tc:>11.3f}s{tp:>11.3f}s{tp / tc:>9.1f}x")
    print(f"\nslice sizes: {sorted(set(sizes_c))}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
