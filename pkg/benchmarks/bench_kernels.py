#!/usr/bin/env python3
"""Compare the compiled kernel against the pure-Python fallback.

Micro-benchmarks the three hot primitives and times whole certification runs
with each backend.  Run from the repository root:

    python benchmarks/bench_kernels.py [--full]

--full adds the Hartwig reverse-order-law instance (tens of seconds on the
pure backend).
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from opcert.certify import certify
from opcert.kernels import load_kernel
from opcert.statements import load_problem, translate

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "opcert" / "fixtures"


def load_backends():
    backends = [("python", load_kernel("py"))]
    try:
        backends.insert(0, ("c", load_kernel("c")))
    except ImportError:
        print("note: compiled kernel not built; benchmarking the fallback only")
    return backends


def bench_primitives(kernel, repeat=200):
    rng = random.Random(1)
    words = [tuple(rng.randrange(8) for _ in range(rng.randint(2, 10)))
             for _ in range(400)]
    leads = {w[:3]: (i, 1, w[:3]) for i, w in enumerate(words[:40])}
    lengths = (3,)
    t0 = time.perf_counter()
    for _ in range(repeat):
        for w in words:
            kernel.find_best_match(w, leads, lengths)
    match_t = time.perf_counter() - t0

    items = [(w[:4], 1) for w in words[:24]]
    t0 = time.perf_counter()
    for _ in range(repeat):
        dst = {}
        for w in words:
            kernel.submul(dst, items, 1, w[:2], w[2:4])
    submul_t = time.perf_counter() - t0

    pairs = [(i, w) for i, w in enumerate(words[:60])]
    t0 = time.perf_counter()
    for _ in range(repeat):
        for w in words[:60]:
            kernel.batch_overlaps(w, pairs)
    overlap_t = time.perf_counter() - t0
    return match_t, submul_t, overlap_t


def bench_problem(kernel, name):
    prob = load_problem(FIXTURES / f"{name}.prob")
    trans = translate(prob, workers=1)
    t0 = time.perf_counter()
    report = certify(trans.assumptions, trans.claims, trans.order,
                     prob.options.limits,
                     assumption_names=trans.assumption_names,
                     claim_names=trans.claim_names, kernel=kernel)
    dt = time.perf_counter() - t0
    assert all(r.certified for r in report.results), name
    return dt


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full", action="store_true",
                        help="include the Hartwig (v)=>(i) instance")
    args = parser.parse_args()

    backends = load_backends()
    rows = []
    for name, kernel in backends:
        match_t, submul_t, overlap_t = bench_primitives(kernel)
        row = {"backend": name, "find_best_match": match_t,
               "submul": submul_t, "batch_overlaps": overlap_t}
        for prob in ("werner", "thm2_3_v_to_i", "thm2_8_ii_to_i"):
            row[prob] = bench_problem(kernel, prob)
        if args.full:
            row["hartwig_v_to_i"] = bench_problem(kernel, "hartwig_v_to_i")
        rows.append(row)

    cols = list(rows[0].keys())
    widths = {c: max(len(c), 10) for c in cols}
    print("  ".join(c.ljust(widths[c]) for c in cols))
    for row in rows:
        print("  ".join(
            (row[c] if isinstance(row[c], str) else f"{row[c]:.3f}s").ljust(widths[c])
            for c in cols))
    if len(rows) == 2:
        print()
        for c in cols[1:]:
            ratio = rows[1][c] / rows[0][c]
            print(f"speedup {c}: {ratio:.1f}x")


if __name__ == "__main__":
    main()
