import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_partial_trace, brute_sign_projector
from multiconc.hilbert import (
    DensityMatrix,
    DimensionCapError,
    PureState,
    SignString,
    SubsystemDims,
    TwoCopyOperator,
    all_sign_strings,
    apply_sign_string_projector,
    dense_sign_string_projector,
    local_projector,
    partial_trace,
    purity,
    swap_operator,
    tensor_product,
    two_copy,
)
from multiconc.states import ghz, product_state, random_mixed, random_pure


# ---------------------------------------------------------------- types

def test_subsystem_dims_basics():
    dims = SubsystemDims([2, 3, 2])
    assert dims.n == 3
    assert dims.total_dim == 12
    assert dims.two_copy_dim == 144


@pytest.mark.parametrize("bad", [[], [1, 2], [2, 0]])
def test_subsystem_dims_rejects_invalid(bad):
    with pytest.raises(ValueError):
        SubsystemDims(bad)


def test_subsystem_dims_cap():
    SubsystemDims([2] * 10)  # D**2 = 2**20 sits exactly on the default cap
    with pytest.raises(DimensionCapError):
        SubsystemDims([2] * 11)
    with pytest.raises(DimensionCapError):
        SubsystemDims([2, 2], cap=15)
    with pytest.raises(DimensionCapError):
        SubsystemDims([3, 3, 3]).require_dense()


def test_pure_state_normalization():
    with pytest.raises(ValueError):
        PureState([2], [1.0, 1.0])
    with pytest.raises(ValueError):
        PureState([2, 2], [1.0, 0.0])
    psi = PureState([2], [1.0, 0.0])
    assert psi.n == 1


def test_density_matrix_validation():
    DensityMatrix([2], np.eye(2) / 2)
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix([2], np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix([2], np.eye(2))
    with pytest.raises(ValueError, match="positive"):
        DensityMatrix([2], np.diag([1.5, -0.5]))


def test_sign_string_parse_and_parity():
    s = SignString.parse("+--")
    assert s.signs == (1, -1, -1)
    assert s.parity == "even"
    assert str(s) == "+--"
    assert SignString.parse("−+").parity == "odd"
    with pytest.raises(ValueError):
        SignString.parse("+x")
    with pytest.raises(ValueError):
        SignString((1, 0))


def test_two_copy_operator_checks_projector_label():
    dims = SubsystemDims([2])
    TwoCopyOperator(dims, local_projector(2, "+"), "P_sign_string")
    with pytest.raises(ValueError, match="idempotent"):
        TwoCopyOperator(dims, 2 * local_projector(2, "+"), "P_sign_string")
    TwoCopyOperator(dims, 2 * local_projector(2, "+"), "A")
    with pytest.raises(ValueError, match="Hermitian"):
        TwoCopyOperator(dims, np.triu(np.ones((4, 4))), "A")


# ---------------------------------------------------------------- tensor product

def test_tensor_product_examples():
    np.testing.assert_array_equal(tensor_product([[1, 0], [1, 0]]), [1, 0, 0, 0])
    np.testing.assert_array_equal(tensor_product([[1, 0], [0, 1]]), [0, 1, 0, 0])
    np.testing.assert_array_equal(tensor_product([np.eye(2), np.eye(2)]), np.eye(4))


def test_tensor_product_errors():
    with pytest.raises(ValueError):
        tensor_product([])
    with pytest.raises(ValueError):
        tensor_product([np.eye(2), np.array([1, 0])])


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_tensor_product_associative(seed):
    r = np.random.default_rng(seed)
    a, b, c = (r.integers(-5, 6, size=(2, 3)) for _ in range(3))
    left = tensor_product([tensor_product([a, b]), c])
    right = tensor_product([a, tensor_product([b, c])])
    assert np.array_equal(left, right)
    assert np.array_equal(left, tensor_product([a, b, c]))


# ---------------------------------------------------------------- partial trace

def test_partial_trace_bell_is_maximally_mixed():
    rho = partial_trace(ghz(2).density_matrix(), [0])
    np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-14)


def test_partial_trace_product_marginal():
    psi = product_state([[1, 0], [0, 1]])
    rho = partial_trace(psi.density_matrix(), [1])
    np.testing.assert_allclose(rho.matrix, [[0, 0], [0, 1]], atol=1e-14)


def test_partial_trace_ghz3_pair():
    rho = partial_trace(ghz(3).density_matrix(), [0, 1])
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 0.5
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-14)
    np.testing.assert_allclose(brute_partial_trace(ghz(3).density_matrix().matrix, [2, 2, 2], [0, 1]), expected)


@pytest.mark.parametrize("dims", [[2, 3], [2, 2, 2], [3, 2, 2], [2, 3, 2]])
def test_partial_trace_matches_brute_force(dims):
    rho = random_mixed(dims, seed=11)
    psi = random_pure(dims, seed=12)
    n = len(dims)
    for size in range(1, n):
        for keep in itertools.combinations(range(n), size):
            oracle = brute_partial_trace(rho.matrix, dims, keep)
            np.testing.assert_allclose(partial_trace(rho, keep).matrix, oracle, atol=1e-12)
            oracle_pure = brute_partial_trace(psi.density_matrix().matrix, dims, keep)
            np.testing.assert_allclose(partial_trace(psi, keep).matrix, oracle_pure, atol=1e-12)


def test_partial_trace_keeps_order_and_dims():
    psi = random_pure([2, 3, 2], seed=3)
    rho = partial_trace(psi, [2, 1])
    assert rho.dims.dims == (3, 2)


@pytest.mark.parametrize("keep", [[], [0, 1], [0, 0], [5]])
def test_partial_trace_rejects_bad_keep(keep):
    with pytest.raises(ValueError):
        partial_trace(ghz(2).density_matrix(), keep)


@pytest.mark.parametrize("dims", [[2, 2], [2, 3, 2], [2, 2, 2, 2], [3, 3, 2]])
def test_complementary_marginals_share_purity(dims):
    psi = random_pure(dims, seed=sum(dims))
    n = len(dims)
    for size in range(1, n):
        for keep in itertools.combinations(range(n), size):
            comp = [k for k in range(n) if k not in keep]
            assert abs(purity(partial_trace(psi, keep)) - purity(partial_trace(psi, comp))) <= 1e-10


# ---------------------------------------------------------------- purity

def test_purity_examples():
    assert purity(DensityMatrix([2], np.diag([1.0, 0.0]))) == 1.0
    assert purity(DensityMatrix([2], np.eye(2) / 2)) == pytest.approx(0.5, abs=1e-15)
    assert purity(DensityMatrix([2], np.diag([0.75, 0.25]))) == pytest.approx(0.625, abs=1e-15)


# ---------------------------------------------------------------- swap / projectors

def test_swap_d2():
    s = swap_operator(2)
    expected = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_array_equal(s, expected)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_swap_involution(d):
    s = swap_operator(d)
    np.testing.assert_array_equal(s @ s, np.eye(d * d))


def test_swap_spectrum_d2():
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(swap_operator(2))), [-1, 1, 1, 1], atol=1e-14)


def test_swap_rejects_small_d():
    with pytest.raises(ValueError):
        swap_operator(1)
    with pytest.raises(ValueError):
        local_projector(1, "+")


def test_singlet_projector():
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    np.testing.assert_allclose(local_projector(2, "-"), np.outer(singlet, singlet), atol=1e-15)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_projector_traces_match_swap_eigendecomposition(d):
    w = np.linalg.eigvalsh(swap_operator(d))
    n_sym = int(np.sum(np.isclose(w, 1.0)))
    n_anti = int(np.sum(np.isclose(w, -1.0)))
    assert (n_sym, n_anti) == (d * (d + 1) // 2, d * (d - 1) // 2)
    assert np.trace(local_projector(d, "+")).real == pytest.approx(n_sym, abs=1e-12)
    assert np.trace(local_projector(d, "-")).real == pytest.approx(n_anti, abs=1e-12)
    assert np.linalg.matrix_rank(local_projector(d, "+")) == n_sym
    assert np.linalg.matrix_rank(local_projector(d, "-")) == n_anti


@pytest.mark.parametrize("d", [2, 3, 4])
def test_projector_algebra(d):
    pp, pm = local_projector(d, "+"), local_projector(d, -1)
    assert np.max(np.abs(pp + pm - np.eye(d * d))) <= 1e-12
    assert np.max(np.abs(pp @ pp - pp)) <= 1e-10
    assert np.max(np.abs(pm @ pm - pm)) <= 1e-10
    assert np.max(np.abs(pp @ pm)) <= 1e-10
    assert np.max(np.abs(pp - pp.conj().T)) == 0.0


# ---------------------------------------------------------------- matrix-free projector

def test_all_plus_leaves_product_two_copy_unchanged():
    psi = product_state([[1, 0], [np.sqrt(0.3), 1j * np.sqrt(0.7)], [0.6, 0.8]])
    v = two_copy(psi)
    w = apply_sign_string_projector(v, psi.dims, SignString.all_plus(3))
    np.testing.assert_allclose(w, v, atol=1e-14)


def test_bell_minus_minus_weight():
    psi = ghz(2)
    v = two_copy(psi)
    w = apply_sign_string_projector(v, psi.dims, SignString.parse("--"))
    # oracle: explicit 16x16 projector from pair-swap permutations
    dense = brute_sign_projector([2, 2], (-1, -1)) @ v
    np.testing.assert_allclose(w, dense, atol=1e-14)
    assert np.vdot(w, w).real == pytest.approx(0.25, abs=1e-14)


@pytest.mark.parametrize("dims", [[2], [3], [2, 2], [2, 3], [3, 2, 2], [2, 2, 2], [3, 3, 3]])
def test_matrix_free_matches_brute_force(dims, rng):
    dims_obj = SubsystemDims(dims)
    D2 = dims_obj.two_copy_dim
    vec = rng.standard_normal(D2) + 1j * rng.standard_normal(D2)
    for s in all_sign_strings(len(dims)):
        oracle = brute_sign_projector(dims, s.signs) @ vec
        got = apply_sign_string_projector(vec, dims_obj, s)
        assert np.max(np.abs(got - oracle)) <= 1e-10


@pytest.mark.parametrize("dims", [[2, 2], [2, 3], [2, 2, 2]])
def test_dense_sign_projector_matches_brute_force(dims):
    for s in all_sign_strings(len(dims)):
        np.testing.assert_allclose(dense_sign_string_projector(dims, s), brute_sign_projector(dims, s.signs), atol=1e-14)


def test_apply_projector_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_sign_string_projector(np.ones(15), [2, 2], SignString.parse("++"))
    with pytest.raises(ValueError):
        apply_sign_string_projector(np.ones(16), [2, 2], SignString.parse("+++"))


@given(
    dims=st.lists(st.sampled_from([2, 3]), min_size=1, max_size=4),
    seed=st.integers(0, 2**31 - 1),
)
@settings(max_examples=40, deadline=None)
def test_odd_parity_annihilates_two_copies(dims, seed):
    psi = random_pure(dims, seed)
    v = two_copy(psi)
    for s in all_sign_strings(len(dims)):
        if s.parity == "odd":
            w = apply_sign_string_projector(v, psi.dims, s)
            assert np.vdot(w, w).real <= 1e-10


def test_two_copy_respects_cap():
    psi = random_pure(SubsystemDims([2, 2], cap=16), 0)
    assert two_copy(psi).size == 16
