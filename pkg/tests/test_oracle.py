import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermfock import (
    BosonicParams,
    StateParams,
    build_unitary,
    matrix_exp,
    pad_dim_policy,
    rho_brute,
)
from hermfock.oracle import (
    MAX_PAD_DIM,
    displacement_op,
    ladder,
    rotation_op,
    squeeze_op,
)


def test_ladder_examples():
    a, ad = ladder(3)
    expected = np.zeros((3, 3))
    expected[0, 1], expected[1, 2] = 1, math.sqrt(2)
    assert np.array_equal(a, expected)
    assert np.array_equal(ad, a.conj().T)


@pytest.mark.parametrize("dim", [2, 5, 17])
def test_number_operator_and_commutator(dim):
    a, ad = ladder(dim)
    number = ad @ a
    assert np.allclose(np.diag(number), np.arange(dim), atol=1e-14)
    assert np.count_nonzero(number - np.diag(np.diag(number))) == 0
    comm = a @ ad - ad @ a
    expected = np.eye(dim)
    expected[-1, -1] = 1 - dim
    assert np.allclose(comm, expected, atol=1e-13)


def test_ladder_rejects_small_dim():
    with pytest.raises(ValueError):
        ladder(1)


def test_matrix_exp_trivial():
    assert np.array_equal(matrix_exp(np.zeros((4, 4))), np.eye(4))
    d = np.array([0.3, -1.2 + 0.5j, 2.0, -4.0])
    assert np.allclose(matrix_exp(np.diag(d)), np.diag(np.exp(d)), rtol=1e-13, atol=0)


def test_matrix_exp_against_mpmath(rng):
    N = np.triu(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)), 1)
    M = N + np.diag(rng.normal(size=6) + 1j * rng.normal(size=6))
    ref = mp.expm(mp.matrix(M.tolist()))
    ref = np.array([[complex(ref[i, j]) for j in range(6)] for i in range(6)])
    assert np.abs(matrix_exp(M) - ref).max() <= 1e-12 * np.abs(ref).max()


def test_matrix_exp_large_norm_relative(rng):
    H = rng.normal(size=(8, 8))
    H = 6 * (H + H.T)  # Hermitian, so exp is easy to get independently
    w, V = np.linalg.eigh(H)
    ref = (V * np.exp(w)) @ V.T
    assert np.abs(H).sum(axis=0).max() <= 200
    assert np.abs(matrix_exp(H) - ref).max() <= 1e-12 * np.abs(ref).max()


def test_matrix_exp_errors():
    with pytest.raises(ValueError):
        matrix_exp(np.zeros((2, 3)))
    with pytest.raises(OverflowError):
        matrix_exp(np.array([[np.inf, 0], [0, 0]]))


def test_build_unitary_examples():
    assert np.allclose(build_unitary(BosonicParams(0, 0, 0, 0), 6, 12), np.eye(6), atol=1e-15)
    phi = 0.7
    R = build_unitary(BosonicParams(0, phi, 0, 0), 6, 12)
    assert np.allclose(R, np.diag(np.exp(1j * phi * np.arange(6))), atol=1e-15)
    assert np.array_equal(rotation_op(phi, 4), np.diag(np.exp(1j * phi * np.arange(4))))


def test_build_unitary_full_and_unitarity():
    p = BosonicParams(1.1 - 0.6j, 0.4, 1.2, -0.8)
    full = build_unitary(p, 20, full=True)
    assert full.shape == (pad_dim_policy(20, p.alpha, p.r),) * 2
    U = full[:, :20]
    assert np.abs(U.conj().T @ U - np.eye(20)).max() <= 1e-8


@pytest.mark.parametrize("alpha,dim", [(0.5 + 0.5j, 20), (2.0, 20), (-1.5 + 1.3j, 15)])
def test_displacement_inverse(alpha, dim):
    pad = pad_dim_policy(dim, alpha)
    prod = displacement_op(alpha, pad) @ displacement_op(-alpha, pad)
    assert np.abs(prod[:dim, :dim] - np.eye(dim)).max() <= 1e-9


@pytest.mark.parametrize("r,theta", [(0.3, 0.0), (0.8, 1.1), (1.2, -2.5)])
def test_squeeze_inverse(r, theta):
    dim = 15
    pad = pad_dim_policy(dim, 0, r)
    prod = squeeze_op(r, theta, pad) @ squeeze_op(r, theta + math.pi, pad)
    assert np.abs(prod[:dim, :dim] - np.eye(dim)).max() <= 1e-8


def test_pad_policy():
    assert pad_dim_policy(10) == 50
    assert pad_dim_policy(100) == 200
    assert pad_dim_policy(15, 2.0, 1.2) <= MAX_PAD_DIM
    assert pad_dim_policy(500) == 500  # capped, never below the reported block
    with pytest.raises(ValueError):
        rho_brute(StateParams(0, 0, 0, 1), 10, pad_dim=5)
    with pytest.raises(ValueError):
        rho_brute(StateParams(0, 0, 0, 1), 10, pad_dim=MAX_PAD_DIM + 1)


@pytest.mark.parametrize(
    "alpha,r,nbar",
    [(0.5, 0.2, 0.5), (1 + 0.3j, 0.5, 0.5), (1 + 0.3j, 1.0, 1.0), (2.0, 0.6, 2.0), (-1.2j, 1.2, 0.0)],
)
def test_padding_sufficiency(alpha, r, nbar):
    params = StateParams(alpha, r, 0.5, nbar)
    dim = 15
    pad = pad_dim_policy(dim, alpha, r)
    bigger = min(2 * pad, MAX_PAD_DIM)
    assert bigger > pad
    diff = np.abs(rho_brute(params, dim, pad) - rho_brute(params, dim, bigger)).max()
    assert diff <= 1e-9


def test_rho_brute_examples():
    rho = rho_brute(StateParams(1, 0, 0, 0), 10)
    assert rho[0, 0].real == pytest.approx(math.exp(-1), rel=1e-13)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 1
    th = rho_brute(StateParams(0, 0, 0, 1.0), 8)
    assert np.allclose(th, np.diag(0.5 ** np.arange(1, 9)), atol=1e-15)


def test_rho_brute_deficit():
    pad = 30
    rho, deficit = rho_brute(StateParams(0, 0, 0, 1.0), 10, pad, return_deficit=True)
    assert rho[0, 0] == pytest.approx(0.5)
    assert deficit == pytest.approx(0.5**pad)
    _, none_lost = rho_brute(StateParams(0.5, 0.1, 0, 0.0), 10, pad, return_deficit=True)
    assert none_lost == 0


@given(
    st.complex_numbers(max_magnitude=2),
    st.floats(0, 1.2),
    st.floats(-math.pi, math.pi),
    st.floats(0, 3),
)
def test_rho_brute_physical(alpha, r, theta, nbar):
    rho = rho_brute(StateParams(alpha, r, theta, nbar), 12)
    assert np.abs(rho - rho.conj().T).max() <= 1e-12
    assert np.linalg.eigvalsh(rho).min() >= -1e-10
    assert np.trace(rho).real <= 1 + 1e-12


def test_rho_brute_honours_phi():
    # the rotation cancels in U rho_th U^dagger because rho_th is diagonal
    base = StateParams(0.8 - 0.2j, 0.5, 0.3, 0.7)
    rho = rho_brute(base, 10)

    class WithPhi:
        alpha, r, theta, nbar, phi = base.alpha, base.r, base.theta, base.nbar, 1.3

    assert np.abs(rho_brute(WithPhi, 10) - rho).max() <= 1e-12
