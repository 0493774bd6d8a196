"""Benchmark the compiled word kernel against the pure-Python fallback.

Runs the kernel hot paths (free reduction, multiplication, morphism
application, bounded cone classification) on identical inputs through
both backends and reports the median wall time and speedup.

Usage: python3 benchmarks/bench_kernel.py [--repeats N]
"""

from __future__ import annotations

import argparse
import random
import time

from freemult import _kernel_py

try:
    from freemult import _kernel
except ImportError:
    _kernel = None


def make_words(rng: random.Random, m: int, count: int, length: int):
    letters = [i for i in range(-m, m + 1) if i != 0]
    words = []
    for _ in range(count):
        w = []
        for _ in range(length):
            choices = [l for l in letters if not w or l != -w[-1]]
            w.append(rng.choice(choices))
        words.append(tuple(w))
    return words


def make_streams(rng: random.Random, m: int, count: int, length: int):
    letters = [i for i in range(-m, m + 1) if i != 0]
    return [
        tuple(rng.choice(letters) for _ in range(length)) for _ in range(count)
    ]


def median_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    times.sort()
    return times[len(times) // 2]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = random.Random(0)
    m = 3
    words = make_words(rng, m, 400, 60)
    streams = make_streams(rng, m, 400, 120)

    # images of a -> a, b -> ab, c -> c over rank 3 (a morphism with
    # stretch 2, enough to make classify_cone walk a few levels)
    images = [None] * (2 * m + 1)
    images[1 + m] = (1,)
    images[-1 + m] = (-1,)
    images[2 + m] = (1, 2)
    images[-2 + m] = (-2, -1)
    images[3 + m] = (3,)
    images[-3 + m] = (-3,)

    cone_args = []
    for y in make_words(rng, m, 60, 3):
        for z in ((1,), (2,), (-1,), (1, 2)):
            cone_args.append((y, z))

    def bench_multiply(k):
        def run():
            for i in range(len(words) - 1):
                k.multiply(words[i], words[i + 1])

        return run

    def bench_reduce(k):
        def run():
            for s in streams:
                k.reduce_word(s)

        return run

    def bench_morphism(k):
        def run():
            for w in words:
                k.apply_morphism(w, images, m)

        return run

    def bench_classify(k):
        def run():
            for y, z in cone_args:
                k.classify_cone(y, z, images, m, len(z) * 2 + len(y), 2)

        return run

    suites = [
        ("multiply", bench_multiply),
        ("reduce_word", bench_reduce),
        ("apply_morphism", bench_morphism),
        ("classify_cone", bench_classify),
    ]

    print(f"{'case':<16}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, make in suites:
        t_py = median_time(make(_kernel_py), args.repeats)
        if _kernel is None:
            print(f"{name:<16}{t_py * 1e3:>10.2f}ms{'n/a':>12}{'n/a':>10}")
            continue
        t_cy = median_time(make(_kernel), args.repeats)
        print(
            f"{name:<16}{t_py * 1e3:>10.2f}ms{t_cy * 1e3:>10.2f}ms"
            f"{t_py / t_cy:>9.1f}x"
        )
    if _kernel is None:
        print("compiled kernel not built; only the fallback was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
