"""Compare the compiled synthesis kernels against the pure-Python fallback.

Run from the repository root:  python3 benchmarks/bench_kernels.py
"""

import time

from spoofkit import _kernels_py as pure
from spoofkit import kernels


def best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


_PEAK_INPUT = pure.oscillation_values(30_000, 20_000_000, 9.81, 2.0, 0.3, 1.9, 0.05, 9)[2::3]

CASES = [
    (
        "gaussians 200k",
        lambda mod: mod.gaussians(7, 200_000),
    ),
    (
        "oscillation 30k noisy",
        lambda mod: mod.oscillation_values(30_000, 20_000_000, 9.81, 2.0, 0.3, 1.9, 0.05, 42),
    ),
    (
        "oscillation 30k clean",
        lambda mod: mod.oscillation_values(30_000, 20_000_000, 9.81, 2.0, 0.3, 1.9, 0.0, 0),
    ),
    (
        "halfsine 30k noisy",
        lambda mod: mod.halfsine_values(30_000, 20_000_000, 9.81, 35.0, 60.0, 0.2, 0.01, 3),
    ),
    (
        "peak_count 30k",
        lambda mod: mod.peak_count(_PEAK_INPUT, 10.81, 13),
    ),
]


def main():
    compiled = kernels.available_backends().get("compiled")
    print(f"active backend: {kernels.BACKEND}")
    if compiled is None:
        print("compiled extension not built; nothing to compare")
        return

    header = f"{'case':<24}{'pure':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, fn in CASES:
        t_pure = best_of(lambda: fn(pure))
        t_comp = best_of(lambda: fn(compiled))
        print(f"{name:<24}{t_pure * 1e3:>10.2f}ms{t_comp * 1e3:>10.2f}ms{t_pure / t_comp:>9.1f}x")

    # the speedup must never come at the cost of different output
    for name, fn in CASES:
        assert fn(pure) == fn(compiled), f"backend mismatch in {name}"
    print("outputs bit-identical across backends")


if __name__ == "__main__":
    main()
