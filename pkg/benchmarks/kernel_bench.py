"""Compare the compiled search kernels against their pure-Python twins.

Both backends are driven by the same generator and the same float
ordering, so their outputs must match bit for bit; this script verifies
that on every run and reports the wall-time ratio.

Usage::

    python3 benchmarks/kernel_bench.py [--n 600] [--nw 20] [--reps 5]
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

from crowdmarket._kernels import _pykernels

try:
    from crowdmarket._kernels import _ckernels
except ImportError:
    _ckernels = None

from crowdmarket.metaheuristics import ACOConfig, GAConfig, PSOConfig


def _score_vector(n: int, seed: int) -> list[float]:
    # product of four unit uniforms, like a typical multiplicative score
    values = [u / 2.0**64 for u in _pykernels.rng_stream(seed, 4 * n)]
    return [
        values[4 * i] * values[4 * i + 1] * values[4 * i + 2] * values[4 * i + 3]
        for i in range(n)
    ]


def _runs(module, kernel: str, qos, nw: int, cfg, reps: int):
    fn = getattr(module, f"{kernel}_evolve")
    if kernel == "ga":
        args = (qos, nw, cfg.population_size, cfg.iterations, cfg.crossover_rate,
                cfg.mutation_rate, cfg.tournament_k, cfg.elitism, cfg.seed)
    elif kernel == "pso":
        args = (qos, nw, cfg.population_size, cfg.iterations, cfg.inertia,
                cfg.cognitive, cfg.social, cfg.seed)
    else:
        args = (qos, nw, cfg.population_size, cfg.iterations, cfg.evaporation,
                cfg.deposit, cfg.alpha, cfg.beta, cfg.seed)
    times = []
    result = None
    for _ in range(reps):
        t0 = time.perf_counter()
        result = fn(*args)
        times.append(time.perf_counter() - t0)
    return result, statistics.median(times)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=600, help="candidate count")
    parser.add_argument("--nw", type=int, default=20, help="group size")
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels unavailable; nothing to compare", file=sys.stderr)
        return 1

    qos = _score_vector(args.n, args.seed)
    configs = {
        "ga": GAConfig(seed=args.seed),
        "pso": PSOConfig(seed=args.seed),
        "aco": ACOConfig(seed=args.seed),
    }
    print(f"n={args.n} nw={args.nw} reps={args.reps} seed={args.seed}")
    print("| kernel | pure_ms | compiled_ms | speedup | identical |")
    print("| --- | ---: | ---: | ---: | --- |")
    ok = True
    for kernel, cfg in configs.items():
        py_out, py_t = _runs(_pykernels, kernel, qos, args.nw, cfg, args.reps)
        c_out, c_t = _runs(_ckernels, kernel, qos, args.nw, cfg, args.reps)
        same = (
            list(py_out[0]) == list(c_out[0])
            and py_out[1] == c_out[1]
            and list(py_out[2]) == list(c_out[2])
        )
        ok = ok and same
        print(
            f"| {kernel} | {py_t * 1e3:.2f} | {c_t * 1e3:.2f} "
            f"| {py_t / c_t:.1f}x | {'yes' if same else 'NO'} |"
        )
    if not ok:
        print("backend outputs diverged", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
