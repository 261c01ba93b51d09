"""Compare the numba and numpy implementations of the two-copy kernels.

    python benchmarks/bench_kernels.py --max-qubits 10 --repeat 5
"""
import argparse
import time

import numpy as np

from multiconc import _accel


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def all_pairs(project, vec, dims):
    out = vec
    for j in range(dims.size):
        out = project(out, dims, j, -1 if j % 2 else 1)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--max-qubits", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _accel.project_pair_numba is None:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    # compile outside the timed region
    warm = np.ones(16, dtype=np.complex128)
    _accel.project_pair_numba(warm, np.array([2, 2]), 0, 1)
    _accel.swap_copies_numba(warm, 4)

    print(f"{'kernel':<14} {'dims':<16} {'D^2':>9} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'max diff':>9}")
    cases = [[2] * n for n in range(2, args.max_qubits + 1, 2)] + [[3] * n for n in (2, 4, 6)]
    for dims_list in cases:
        dims = np.array(dims_list, dtype=np.int64)
        n2 = int(np.prod(dims)) ** 2
        if n2 > 2**20:
            continue
        vec = rng.standard_normal(n2) + 1j * rng.standard_normal(n2)

        t_np = best_of(lambda: all_pairs(_accel.project_pair_numpy, vec, dims), args.repeat)
        t_nb = best_of(lambda: all_pairs(_accel.project_pair_numba, vec, dims), args.repeat)
        diff = np.max(np.abs(all_pairs(_accel.project_pair_numpy, vec, dims) - all_pairs(_accel.project_pair_numba, vec, dims)))
        label = "x".join(map(str, dims_list)) if len(dims_list) < 6 else f"{dims_list[0]}^{len(dims_list)}"
        print(f"{'project_pair':<14} {label:<16} {n2:>9} {1e3 * t_np:>11.3f} {1e3 * t_nb:>11.3f} {t_np / t_nb:>8.2f} {diff:>9.1e}")

        D = int(np.prod(dims))
        t_np = best_of(lambda: _accel.swap_copies_numpy(vec, D), args.repeat)
        t_nb = best_of(lambda: _accel.swap_copies_numba(vec, D), args.repeat)
        print(f"{'swap_copies':<14} {label:<16} {n2:>9} {1e3 * t_np:>11.3f} {1e3 * t_nb:>11.3f} {t_np / t_nb:>8.2f}")


if __name__ == "__main__":
    main()
