"""Brute-force oracles, written against basis labels only.

None of these reuse the package's reshaping or projector code, so they can
check it.
"""
import itertools

import numpy as np
import pytest


def basis_labels(dims):
    return list(itertools.product(*[range(d) for d in dims]))


def label_index(label, dims):
    idx = 0
    for digit, d in zip(label, dims):
        idx = idx * d + digit
    return idx


def brute_partial_trace(rho, dims, keep):
    keep = sorted(keep)
    rest = [k for k in range(len(dims)) if k not in keep]
    kd = [dims[k] for k in keep]
    out = np.zeros((int(np.prod(kd)),) * 2, dtype=complex)
    for a in basis_labels(kd):
        for b in basis_labels(kd):
            acc = 0.0
            for r in basis_labels([dims[k] for k in rest]):
                la = [0] * len(dims)
                lb = [0] * len(dims)
                for k, v in zip(keep, a):
                    la[k] = v
                for k, v in zip(keep, b):
                    lb[k] = v
                for k, v in zip(rest, r):
                    la[k] = v
                    lb[k] = v
                acc += rho[label_index(la, dims), label_index(lb, dims)]
            out[label_index(a, kd), label_index(b, kd)] = acc
    return out


def brute_pair_swap(dims, subset):
    """Permutation on the two-copy space exchanging x_j <-> y_j for j in subset."""
    n = len(dims)
    full = list(dims) * 2
    dim2 = int(np.prod(full))
    m = np.zeros((dim2, dim2))
    for lab in basis_labels(full):
        new = list(lab)
        for j in subset:
            new[j], new[n + j] = lab[n + j], lab[j]
        m[label_index(new, full), label_index(lab, full)] = 1.0
    return m


def brute_sign_projector(dims, signs, positions=None):
    """prod_j (1 + s_j S_j)/2 expanded as a signed sum of pair-swap permutations."""
    positions = list(range(len(dims))) if positions is None else list(positions)
    total = 0.0
    for r in range(len(positions) + 1):
        for subset in itertools.combinations(range(len(positions)), r):
            coeff = np.prod([signs[i] for i in subset]) if subset else 1.0
            total = total + coeff * brute_pair_swap(dims, [positions[i] for i in subset])
    return total / 2 ** len(positions)


def brute_global_swap(D):
    m = np.zeros((D * D, D * D))
    for a in range(D):
        for b in range(D):
            m[b * D + a, a * D + b] = 1.0
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
