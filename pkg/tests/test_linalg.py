from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from groupoid_lab import config
from groupoid_lab.errors import NotHermitian, NotStarClosed
from groupoid_lab.linalg import (
    block_decompose,
    commutant_basis,
    hermitian_spectrum,
    is_projection,
    is_unitary,
    jacobi_eigh,
    operator_norm,
    polar_unitary,
    range_basis,
)
from groupoid_lab.oracles import dense_operator_norm

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def complex_matrix(n):
    return arrays(np.float64, (2, n, n), elements=finite).map(lambda a: a[0] + 1j * a[1])


def test_operator_norm_examples():
    assert operator_norm(np.eye(3)) == pytest.approx(1.0, rel=1e-12)
    assert operator_norm(np.ones((2, 2))) == pytest.approx(2.0, rel=1e-12)
    assert operator_norm(np.zeros((2, 2))) == 0.0


def test_operator_norm_with_start_orthogonal_to_top_vector():
    M = np.array([[1.0, -1.0], [-1.0, 1.0]])
    assert operator_norm(M) == pytest.approx(2.0, rel=1e-10)


def test_spectrum_examples():
    assert hermitian_spectrum(np.diag([3.0, 1.0, 2.0])) == pytest.approx([1, 2, 3])
    assert hermitian_spectrum(np.ones((2, 2))) == pytest.approx([0, 2], abs=1e-12)
    assert hermitian_spectrum([[0, 1], [1, 0]]) == pytest.approx([-1, 1])


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitian):
        jacobi_eigh([[0, 1], [0, 0]])


def test_block_examples():
    # regular representation of Z/2
    e, s = np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])
    assert block_decompose([e, s]).blocks() == [1, 1]
    units = []
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2))
            E[i, j] = 1
            units.append(E)
    assert block_decompose(units).blocks() == [2]
    assert block_decompose([np.eye(3)]).blocks() == [1]
    assert block_decompose([np.eye(3)]).multiplicities == (3,)


def test_block_decompose_needs_star_closure():
    with pytest.raises(NotStarClosed):
        block_decompose([np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]])])


def test_block_profile_is_deterministic():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 3))
    A = A + A.T
    basis = [np.kron(np.eye(2), B) for B in (np.eye(3), A, A @ A)]
    p1, p2 = block_decompose(basis), block_decompose(basis)
    assert p1.sizes == p2.sizes and p1.multiplicities == p2.multiplicities


def test_block_sizes_square_to_algebra_dimension():
    # M_2 acting twice plus C acting once: dimension 4 + 1
    mats = []
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2))
            E[i, j] = 1
            mats.append(np.block([[E, np.zeros((2, 2)), np.zeros((2, 1))],
                                  [np.zeros((2, 2)), E, np.zeros((2, 1))],
                                  [np.zeros((1, 5))]]))
    D = np.zeros((5, 5))
    D[4, 4] = 1
    mats.append(D)
    prof = block_decompose(mats)
    assert sorted(prof.sizes) == [1, 2]
    assert sum(d * d for d in prof.sizes) == 5
    assert dict(zip(prof.sizes, prof.multiplicities)) == {2: 2, 1: 1}


def test_commutant_of_full_algebra_is_scalars():
    mats = [np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])]
    C = commutant_basis(mats)
    assert len(C) == 1
    assert np.allclose(C[0] / C[0][0, 0], np.eye(2))


def test_range_basis_and_projections():
    P = np.array([[0.5, 0.5], [0.5, 0.5]])
    assert is_projection(P)
    B = range_basis(P)
    assert B.shape == (2, 1)
    assert range_basis(np.zeros((2, 2))).shape == (2, 0)
    assert is_unitary(polar_unitary(np.array([[2.0, 1.0], [0.0, 3.0]])))


@given(complex_matrix(4))
def test_norm_squares_under_adjoint_product(M):
    n = operator_norm(M)
    if n < 1e-6:
        return
    assert operator_norm(M.conj().T @ M) == pytest.approx(n * n, rel=1e-8)
    assert n == pytest.approx(dense_operator_norm(M), rel=1e-8)


@given(complex_matrix(5))
def test_spectrum_conserves_trace(M):
    H = M + M.conj().T
    w = hermitian_spectrum(H)
    assert sum(w) == pytest.approx(float(np.trace(H).real), abs=1e-10 * max(1.0, np.abs(H).max()) * 5)
    assert w == sorted(w)
    assert np.allclose(w, np.linalg.eigvalsh(H), atol=1e-9 * max(1.0, np.abs(H).max()))


def test_seed_override_changes_nothing_observable():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    with config.override(probe_seed=1):
        a = operator_norm(M)
    assert a == pytest.approx(operator_norm(M), rel=1e-12)
