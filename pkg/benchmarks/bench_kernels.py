"""Compare the compiled and pure-Python kernels on representative workloads.

    python benchmarks/bench_kernels.py [--repeat 3]

Each workload is run once per backend and the outputs are checked for
equality before timings are reported.
"""
from __future__ import annotations

import argparse
import random
import time

from twistchar import kernels
from twistchar.folded import folded_data
from twistchar.oracle import build_gcm, freudenthal_char, peterson_mults
from twistchar.quasiparticle import caps, charges_from_p, grid_for, p_matrices


def _freudenthal(token, k, depth):
    g = build_gcm(folded_data(token))
    roots = peterson_mults(g, depth)
    return lambda backend: freudenthal_char(g, k, depth, roots=roots, backend=backend).mults


def _histograms(token, k, N):
    """Every charge-type histogram of the principal enumeration up to ``N``."""
    f = folded_data(token)
    grid = grid_for(f, k)
    jobs = []
    for P, low in p_matrices(f, k, N):
        charges = charges_from_p(P)
        c = caps(charges, f)
        flat = ([], [], [], [])
        for i, ns in enumerate(charges):
            for p, n in enumerate(ns):
                flat[0].append(int(c[i][p] * grid))
                flat[1].append(int(f.rho[i] * grid))
                flat[2].append(n)
                flat[3].append(p == 0 or ns[p - 1] != n)
        b = (N - low) * grid
        jobs.append(flat + (b.numerator // b.denominator,))
    return lambda backend: [kernels.qp_histogram(*job, check=False, backend=backend)
                            for job in jobs]


def _convolution(n, seed=0):
    rng = random.Random(seed)
    a = [rng.randint(0, 1000) for _ in range(n)]
    b = [rng.randint(0, 1000) for _ in range(n)]
    return lambda backend: kernels.conv_trunc(a, b, n, backend=backend)


WORKLOADS = [
    ("freudenthal A3^2 k=2 depth 10", _freudenthal("A3^2", 2, 10)),
    ("freudenthal D4^3 k=2 depth 9", _freudenthal("D4^3", 2, 9)),
    ("freudenthal E6^2 k=1 depth 6", _freudenthal("E6^2", 1, 6)),
    ("histograms A5^2 k=3 N=6", _histograms("A5^2", 3, 6)),
    ("histograms D5^2 k=3 N=6", _histograms("D5^2", 3, 6)),
    ("convolution n=3000", _convolution(3000)),
]


def best_of(fn, backend, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernels.BACKEND != "cython":
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    print(f"{'workload':36} {'cython':>10} {'python':>10} {'speedup':>8}")
    for name, fn in WORKLOADS:
        tc, rc = best_of(fn, "cython", args.repeat)
        tp, rp = best_of(fn, "python", args.repeat)
        if rc != rp:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:36} {tc:10.4f} {tp:10.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
