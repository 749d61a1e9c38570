"""Time the compiled kernels against the numpy fallback.

Run from the repository root after an editable install:

    python3 benchmarks/bench_kernels.py [--repeats 5]

Both backends are imported directly, so the ANODIST_PURE_PYTHON switch is
irrelevant here.  Each case reports the best wall time over the repeats and
checks that the two implementations agree exactly (the AUC numerator is
integer-valued) or to float tolerance (the weighted sums of squares).
"""

import argparse
import time

import numpy as np

from anodist import _kernels_ref

try:
    from anodist import _fastkern
except ImportError:
    _fastkern = None


def best_time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_mw(rng, n_ok, n_ko, repeats):
    ok = rng.standard_normal(n_ok)
    ko = rng.standard_normal(n_ko) + 0.3
    ref = _kernels_ref.mw_numerator(ok, ko)
    t_ref = best_time(lambda: _kernels_ref.mw_numerator(ok, ko), repeats)
    row = [f"mw_numerator {n_ok}x{n_ko}", t_ref, None, ""]
    if _fastkern is not None:
        fast = _fastkern.mw_numerator(ok, ko)
        assert fast == ref, (fast, ref)
        row[2] = best_time(lambda: _fastkern.mw_numerator(ok, ko), repeats)
        row[3] = "exact match"
    return row


def bench_sumsq(rng, rows, cols, repeats):
    y = rng.standard_normal((rows, cols))
    w = rng.uniform(0.1, 2.0, size=cols)
    ref = _kernels_ref.weighted_sumsq_rows(y, w)
    t_ref = best_time(lambda: _kernels_ref.weighted_sumsq_rows(y, w), repeats)
    row = [f"weighted_sumsq {rows}x{cols}", t_ref, None, ""]
    if _fastkern is not None:
        fast = _fastkern.weighted_sumsq_rows(y, w)
        assert np.allclose(fast, ref, rtol=1e-12, atol=0.0)
        row[2] = best_time(lambda: _fastkern.weighted_sumsq_rows(y, w), repeats)
        row[3] = "allclose"
    return row


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _fastkern is None:
        print("compiled backend not available; timing the fallback only")

    rng = np.random.default_rng(0)
    rows = [
        bench_mw(rng, 1_000, 1_000, args.repeats),
        bench_mw(rng, 5_000, 5_000, args.repeats),
        bench_mw(rng, 20_000, 20_000, args.repeats),
        bench_sumsq(rng, 1_000, 32, args.repeats),
        bench_sumsq(rng, 100_000, 32, args.repeats),
        bench_sumsq(rng, 10_000, 256, args.repeats),
    ]

    print(f"{'case':28s} {'fallback':>12s} {'compiled':>12s} {'speedup':>8s}  agreement")
    for name, t_ref, t_fast, note in rows:
        if t_fast is None:
            print(f"{name:28s} {t_ref * 1e3:10.3f}ms {'-':>12s} {'-':>8s}")
        else:
            print(
                f"{name:28s} {t_ref * 1e3:10.3f}ms {t_fast * 1e3:10.3f}ms "
                f"{t_ref / t_fast:7.2f}x  {note}"
            )


if __name__ == "__main__":
    main()
