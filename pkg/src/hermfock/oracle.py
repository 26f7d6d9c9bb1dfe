"""Brute-force ground truth from truncated ladder operators.

Nothing here touches a Hermite polynomial: the unitary is the product of
matrix exponentials of truncated generators, and the state is
``U rho_th U^dagger`` by dense matrix products. Truncation is done on a
padded space and only the inner block is reported.
"""

from __future__ import annotations

import math

import numpy as np

from ._validation import as_complex, as_real, check_dim
from .unitary import BosonicParams

TAYLOR_ORDER = 18
MAX_PAD_DIM = 400


def ladder(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation operators on ``span{|0>, ..., |dim-1>}``."""
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T


def matrix_exp(M: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring of an order-18 Taylor series."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    norm = np.abs(M).sum(axis=0).max() if M.size else 0.0
    if not np.isfinite(norm):
        raise OverflowError("matrix norm is not finite")
    squarings = max(0, math.ceil(math.log2(norm))) if norm > 1 else 0
    A = M / 2.0**squarings
    eye = np.eye(M.shape[0], dtype=complex)
    # Horner form of sum_k A^k / k!
    E = eye + A / TAYLOR_ORDER
    for k in range(TAYLOR_ORDER - 1, 0, -1):
        E = eye + (A @ E) / k
    for _ in range(squarings):
        E = E @ E
    return E


def pad_dim_policy(trunc_dim: int, alpha=0j, r: float = 0.0) -> int:
    """Working dimension for a reported block of size ``trunc_dim``.

    Squeezing leaks population upward geometrically in ``tanh r`` and
    displacement over a band of width ~``|alpha|^2``; the margin below keeps
    the inner block converged to ~1e-13 for ``|alpha| <= 2``, ``r <= 1.2``.
    Capped at ``MAX_PAD_DIM``.
    """
    alpha = as_complex(alpha, "alpha")
    extra = math.ceil(20 * math.exp(2 * r)) + math.ceil(8 * abs(alpha) ** 2) + 20
    return min(max(2 * trunc_dim, trunc_dim + extra), max(MAX_PAD_DIM, trunc_dim))


def _check_pad(trunc_dim: int, pad_dim: int) -> None:
    if pad_dim < trunc_dim:
        raise ValueError(f"pad_dim={pad_dim} is smaller than trunc_dim={trunc_dim}")
    if pad_dim > MAX_PAD_DIM:
        raise ValueError(f"pad_dim={pad_dim} exceeds {MAX_PAD_DIM}")


def displacement_op(alpha, dim: int) -> np.ndarray:
    a, ad = ladder(dim)
    alpha = as_complex(alpha, "alpha")
    return matrix_exp(alpha * ad - alpha.conjugate() * a)


def squeeze_op(r: float, theta: float, dim: int) -> np.ndarray:
    a, ad = ladder(dim)
    z = r * np.exp(1j * theta)
    return matrix_exp(0.5 * (z * ad @ ad - np.conj(z) * a @ a))


def rotation_op(phi: float, dim: int) -> np.ndarray:
    return np.diag(np.exp(1j * phi * np.arange(dim)))


def build_unitary(
    params: BosonicParams, trunc_dim: int, pad_dim: int | None = None, *, full: bool = False
) -> np.ndarray:
    """``S(z) D(alpha) R(phi)`` built from exponentials of truncated generators.

    Returns the ``trunc_dim x trunc_dim`` block, or the whole padded matrix
    with ``full=True``.
    """
    trunc_dim = check_dim(trunc_dim, "trunc_dim")
    if pad_dim is None:
        pad_dim = pad_dim_policy(trunc_dim, params.alpha, params.r)
    _check_pad(trunc_dim, pad_dim)
    U = (
        squeeze_op(params.r, params.theta, pad_dim)
        @ displacement_op(params.alpha, pad_dim)
        @ rotation_op(params.phi, pad_dim)
    )
    return U if full else U[:trunc_dim, :trunc_dim]


def thermal_diagonal(nbar: float, dim: int) -> np.ndarray:
    """``(1 - Y) Y**m`` for ``m < dim``, not renormalised."""
    nbar = as_real(nbar, "nbar", nonnegative=True)
    Y = nbar / (nbar + 1)
    return (1 - Y) * Y ** np.arange(dim)


def rho_brute(params, trunc_dim: int, pad_dim: int | None = None, *, return_deficit: bool = False):
    """``U rho_th U^dagger`` on the ``trunc_dim`` block by dense products.

    ``params`` is a state parameter record (``alpha, r, theta, nbar``, and
    optionally ``phi``). With ``return_deficit=True`` the probability mass
    of the thermal state lost to truncation, ``Y**pad_dim``, is returned too.
    """
    trunc_dim = check_dim(trunc_dim, "trunc_dim")
    if pad_dim is None:
        pad_dim = pad_dim_policy(trunc_dim, params.alpha, params.r)
    _check_pad(trunc_dim, pad_dim)
    bosonic = BosonicParams(params.alpha, getattr(params, "phi", 0.0), params.r, params.theta)
    U = build_unitary(bosonic, trunc_dim, pad_dim, full=True)
    diag = thermal_diagonal(params.nbar, pad_dim)
    U_top = U[:trunc_dim]
    rho = (U_top * diag) @ U_top.conj().T
    if return_deficit:
        Y = params.nbar / (params.nbar + 1)
        return rho, Y**pad_dim
    return rho
