"""Fock density matrices of noisy Gaussian states ``rho = U rho_th U^dagger``.

The closed form factors the state as ``rho = J K W K^dagger`` with a scalar
``J``, a lower-triangular ``K`` and a Hermitian positive semidefinite ``W``.
The rotation part of the generating unitary drops out because it commutes
with the thermal seed, so a state is fixed by ``(alpha, r, theta, nbar)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ._validation import (
    CEXT,
    EXT,
    SERIES_HARD_CAP,
    ConditioningWarning,
    DomainError,
    SeriesConvergenceWarning,
    as_complex,
    as_ext,
    as_real,
    check_dim,
    check_index,
    log_factorials,
    max_index,
    reduce_angle,
)
from .hlpoly import (
    _Accumulator,
    _ext_pow,
    _hkdf2_ext,
    _hkdf2_normalized_ext,
    _hkdf_ext,
    _hkdf_vector_ext,
    _truncate_series,
    _warn_if_growing,
    laguerre_generalized,
)
from .unitary import BosonicParams, OrderingParams, _ordering_ext, _unitary_block_ext

SERIES_TAIL_TOL = 1e-17
CONDITIONING_TOL = 1e-10
_EXT_EPS = float(np.finfo(EXT).eps)


@dataclass(frozen=True)
class StateParams:
    """Displacement ``alpha``, squeeze ``r e^{i theta}`` and thermal mean photon number ``nbar``."""

    alpha: complex = 0j
    r: float = 0.0
    theta: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_complex(self.alpha, "alpha"))
        object.__setattr__(self, "r", as_real(self.r, "r", nonnegative=True))
        object.__setattr__(self, "theta", reduce_angle(as_real(self.theta, "theta")))
        object.__setattr__(self, "nbar", as_real(self.nbar, "nbar", nonnegative=True))

    def bosonic(self, phi: float = 0.0) -> BosonicParams:
        return BosonicParams(self.alpha, phi, self.r, self.theta)


@dataclass(frozen=True)
class StateDerived:
    """Quantities entering ``rho = J K W K^dagger``.

    ``a`` and ``b`` are the quadratic-form coefficients of the thermal
    generating function: ``a`` multiplies ``z_poly**2`` and ``b`` multiplies
    ``z_poly * conj(z_poly)``.
    """

    Y: float
    L: float
    a: complex
    b: float
    J: float
    ordering: OrderingParams
    z_poly: complex
    u: complex


class FactorMatrices(NamedTuple):
    K: np.ndarray
    W: np.ndarray


class PhotonDistribution(NamedTuple):
    probabilities: np.ndarray
    partial_trace: float


def _check_params(params) -> StateParams:
    if not isinstance(params, StateParams):
        raise TypeError(f"expected StateParams, got {type(params).__name__}")
    return params


@lru_cache(maxsize=256)
def _derive_ext(params: StateParams) -> StateDerived:
    op = _ordering_ext(params.bosonic())
    nbar = EXT(params.nbar)
    Y = nbar / (nbar + 1)
    t2 = np.tanh(EXT(params.r)) ** 2
    radicand = 1 - Y * Y * t2
    if not radicand > 0:
        raise DomainError(f"1 - Y^2 tanh^2 r = {radicand} is not positive")
    L = 1 / radicand
    a = L * Y * Y * np.conj(op.u)
    b = L * Y
    z = op.z_poly
    exponent = a * z * z + np.conj(a) * np.conj(z) ** 2 + b * z * np.conj(z)
    J = (1 - Y) * np.abs(op.K0) ** 2 * np.sqrt(L) * np.exp(exponent)
    if abs(J.imag) > 1e-12 * abs(J) or not J.real > 0:
        raise DomainError(f"J = {J} is not real positive")
    return StateDerived(Y=Y, L=L, a=a, b=b, J=J.real, ordering=op, z_poly=z, u=op.u)


def derive_state(params: StateParams) -> StateDerived:
    """Derived parameters ``Y, L, a, b, J`` (with ``phi = 0``)."""
    d = _derive_ext(_check_params(params))
    op = d.ordering
    ordering = OrderingParams(
        T=complex(op.T),
        S=float(op.S),
        K0=complex(op.K0),
        x=complex(op.x),
        y=complex(op.y),
        z_poly=complex(op.z_poly),
        u=complex(op.u),
        X=complex(op.X),
    )
    return StateDerived(
        Y=float(d.Y),
        L=float(d.L),
        a=complex(d.a),
        b=float(d.b),
        J=float(d.J),
        ordering=ordering,
        z_poly=complex(d.z_poly),
        u=complex(d.u),
    )


def _derived(d) -> StateDerived:
    if isinstance(d, StateParams):
        return _derive_ext(d)
    if isinstance(d, StateDerived):
        return d
    raise TypeError(f"expected StateDerived or StateParams, got {type(d).__name__}")


def thermal_coeff(m: int, n: int, nbar: float) -> float:
    """``(1 - Y) Y**m delta_{mn}`` with ``Y = nbar / (nbar + 1)``."""
    m = check_index(m, "m")
    n = check_index(n, "n")
    nbar = as_real(nbar, "nbar", nonnegative=True)
    if m != n:
        return 0.0
    return (1 / (nbar + 1)) * (nbar / (nbar + 1)) ** m


# ---------------------------------------------------------------------------
# factor entries


def _k_entry_ext(m: int, r: int, d: StateDerived):
    if r > m:
        return CEXT(0)
    op = d.ordering
    lf = log_factorials(m)
    h = CEXT(1) if m == r else _hkdf_ext(m - r, as_ext(op.x), as_ext(op.y))
    return h * _ext_pow(as_ext(op.X), r) * np.exp(0.5 * lf[m] - lf[m - r] - lf[r])


def _w_args(d: StateDerived):
    a, b, z = as_ext(d.a), as_ext(d.b), as_ext(d.z_poly)
    return (2 * a * z + b * np.conj(z), a, 2 * np.conj(a) * np.conj(z) + b * z, np.conj(a), b)


def k_entry(m: int, r: int, d) -> complex:
    """``K_{m,r} = sqrt(m!) H_{m-r}(x, y) X**r / ((m-r)! r!)``; zero above the diagonal."""
    m = check_index(m, "m")
    r = check_index(r, "r")
    return complex(_k_entry_ext(m, r, _derived(d)))


def w_entry(r: int, s: int, d) -> complex:
    """``W_{r,s} = H_{r,s}(2 a z + b z*, a; 2 a* z* + b z, a* | b)`` with ``z = z_poly``."""
    r = check_index(r, "r")
    s = check_index(s, "s")
    return complex(_hkdf2_ext(r, s, *_w_args(_derived(d))))


def g_series(r: int, s: int, d, Jmax: int | None = None) -> complex:
    """Thermal sum ``G_{r,s} = sum_{j >= max(r,s)} H_{j-r}(z,u)/(j-r)! Y**j j! conj(H_{j-s}(z,u))/(j-s)!``.

    Independent of the closed form ``sqrt(L) W_{r,s} exp(a z^2 + a* z*^2 + b |z|^2)``.
    Summation stops at ``Jmax`` when given, otherwise by the relative-tail rule.
    """
    r = check_index(r, "r")
    s = check_index(s, "s")
    d = _derived(d)
    if not d.Y < 1:
        raise DomainError("the thermal series needs Y < 1")
    fixed = Jmax is not None
    top = check_index(Jmax, "Jmax", limit=SERIES_HARD_CAP) if fixed else SERIES_HARD_CAP
    lo = max(r, s)
    if top < lo:
        return 0j
    lf = log_factorials(top)
    z, u = as_ext(d.z_poly), as_ext(d.u)
    # H_k(z, u) / k! for k up to top - min(r, s)
    h = _hkdf_vector_ext(top - min(r, s), z, u, 0.0)
    Y = EXT(d.Y)
    terms = []
    for j in range(lo, top + 1):
        core = h[j - r] * np.conj(h[j - s])
        if Y == 0:
            weight = CEXT(1) if j == 0 else CEXT(0)
        else:
            weight = np.exp(j * np.log(Y) + lf[j])
        terms.append(core * weight)
    terms = np.array(terms, dtype=CEXT)
    _warn_if_growing(terms, "g_series")
    value, _ = _truncate_series(terms, fixed)
    return complex(value)


def g_closed(r: int, s: int, d) -> complex:
    """``sqrt(L) W_{r,s} exp(a z^2 + a* z*^2 + b |z|^2)``."""
    d = _derived(d)
    z = as_ext(d.z_poly)
    a, b = as_ext(d.a), as_ext(d.b)
    pref = np.sqrt(as_ext(d.L)) * np.exp(a * z * z + np.conj(a) * np.conj(z) ** 2 + b * z * np.conj(z))
    return complex(pref * _hkdf2_ext(check_index(r, "r"), check_index(s, "s"), *_w_args(d)))


@lru_cache(maxsize=64)
def _factor_tables_ext(params: StateParams, size: int):
    d = _derive_ext(params)
    K = np.zeros((size, size), dtype=CEXT)
    W = np.zeros((size, size), dtype=CEXT)
    args = _w_args(d)
    hx = _hkdf_vector_ext(size - 1, args[0], args[1], 0.0)
    hz = _hkdf_vector_ext(size - 1, args[2], args[3], 0.0)
    for m in range(size):
        for r in range(m + 1):
            K[m, r] = _k_entry_ext(m, r, d)
    for r in range(size):
        for s in range(r, size):
            W[r, s] = _hkdf2_ext(r, s, *args, hx=hx, hz=hz)
            W[s, r] = np.conj(W[r, s])
    return K, W


def _table_size(size: int) -> int:
    # round up so that scalar lookups at nearby indices share one cached table
    return min(max(16, 1 << (size - 1).bit_length()), max(size, max_index() + 1))


def factor_matrices(params: StateParams, dim: int) -> FactorMatrices:
    """``K`` (lower triangular) and ``W`` (Hermitian) over ``dim x dim``, entry by entry."""
    dim = check_dim(dim)
    K, W = _factor_tables_ext(_check_params(params), dim)
    return FactorMatrices(K.astype(complex), W.astype(complex))


# ---------------------------------------------------------------------------
# density matrix


def rho_coeff(m: int, n: int, params: StateParams) -> complex:
    """``rho_{m,n} = J sum_{r<=m} sum_{s<=n} K_{m,r} W_{r,s} conj(K_{n,s})``."""
    m = check_index(m, "m")
    n = check_index(n, "n")
    params = _check_params(params)
    d = _derive_ext(params)
    K, W = _factor_tables_ext(params, _table_size(max(m, n) + 1))
    acc = _Accumulator()
    for r in range(m + 1):
        acc.add(K[m, r] * np.dot(W[r, : n + 1], np.conj(K[n, : n + 1])))
    return complex(EXT(d.J) * acc.value[()])


def _rho_matrix_ext(params: StateParams, dim: int):
    """Factored product and an elementwise bound on its rounding error."""
    d = _derive_ext(params)
    op = d.ordering
    lf = log_factorials(dim)
    x, y, X = as_ext(op.x), as_ext(op.y), as_ext(op.X)
    # K scaled by sqrt(r!) on the right, W by 1/sqrt(r! s!) on both sides
    Ks = np.zeros((dim, dim), dtype=CEXT)
    for r in range(dim):
        k = np.arange(dim - r)
        col = _hkdf_vector_ext(dim - 1 - r, x, y, 0.5 * (lf[k + r] - lf[r]))
        Ks[r:, r] = col * _ext_pow(X, r)
    Ws = _hkdf2_normalized_ext(dim - 1, dim - 1, *_w_args(d))
    rho = EXT(d.J) * (Ks @ Ws @ np.conj(Ks.T))
    # W grows without bound while rho stays below one, so the product
    # cancels; |J| |K| |W| |K|^T eps is a (pessimistic) size for the damage
    absK = np.abs(Ks).astype(float)
    bound = float(d.J) * _EXT_EPS * (absK @ np.abs(Ws).astype(float) @ absK.T)
    return rho, bound


def rho_error_bound(params: StateParams, dim: int) -> float:
    """Largest a-priori rounding bound of :func:`rho_matrix` on the block.

    Tracks the observed error to within about two orders of magnitude and is
    never below it in tests. It stays tiny for moderate blocks and grows
    quickly once squeezing, displacement and thermal noise are all large.
    """
    dim = check_dim(dim)
    return float(_rho_matrix_ext(_check_params(params), dim)[1].max())


def rho_matrix(params: StateParams, dim: int, *, method: str = "factored") -> np.ndarray:
    """Density matrix over the ``dim x dim`` block.

    Parameters
    ----------
    params : StateParams
    dim : int
    method : {"factored", "series", "auto"}
        ``"factored"`` evaluates ``J K W K^dagger`` and warns with
        :class:`ConditioningWarning` when its rounding bound exceeds
        ``CONDITIONING_TOL``. ``"series"`` sums the thermal series over
        the unitary's coefficients. ``"auto"`` uses the factored form and
        switches to the series when the bound is too large.
    """
    dim = check_dim(dim)
    params = _check_params(params)
    if method not in ("factored", "series", "auto"):
        raise ValueError(f"unknown method {method!r}")
    if method == "series":
        return rho_series_matrix(params, dim)
    rho, bound = _rho_matrix_ext(params, dim)
    worst = float(bound.max())
    if worst > CONDITIONING_TOL:
        if method == "auto":
            return rho_series_matrix(params, dim)
        warnings.warn(
            f"factored product may carry errors up to {worst:.1e}; use method='series' for this block",
            ConditioningWarning,
            stacklevel=2,
        )
    return rho.astype(complex)


def _series_length(Y: float) -> int:
    if Y == 0:
        return 0
    # tail sum_{j > J} Y**j (1 - Y) = Y**(J+1); columns of U have unit norm
    return min(SERIES_HARD_CAP, math.ceil(math.log(SERIES_TAIL_TOL) / math.log(Y)))


def rho_series_matrix(
    params: StateParams, dim: int, Jmax: int | None = None, *, phi: float = 0.0
) -> np.ndarray:
    """``(1 - Y) sum_j U_{m,j} Y**j conj(U_{n,j})`` over the ``dim x dim`` block.

    Uses the unitary's Fock coefficients directly, with an optional rotation
    ``phi`` folded into the unitary (it must drop out of the result).
    """
    dim = check_dim(dim)
    params = _check_params(params)
    nbar = params.nbar
    Y = nbar / (nbar + 1)
    if Jmax is None:
        Jmax = _series_length(Y)
    Jmax = check_index(Jmax, "Jmax", limit=SERIES_HARD_CAP)
    if Y > 0 and Y ** (Jmax + 1) > 1e-12:
        warnings.warn(
            f"thermal tail Y^(Jmax+1) = {Y ** (Jmax + 1):.2e} is not negligible",
            SeriesConvergenceWarning,
            stacklevel=2,
        )
    op = _ordering_ext(params.bosonic(phi))
    U = _unitary_block_ext(op, dim, Jmax + 1)
    Ye = EXT(Y)
    weights = (1 - Ye) * np.array([Ye**j for j in range(Jmax + 1)], dtype=EXT)
    return ((U * weights) @ np.conj(U.T)).astype(complex)


def rho_series_coeff(
    m: int, n: int, params: StateParams, Jmax: int | None = None, *, phi: float = 0.0
) -> complex:
    """Single entry of :func:`rho_series_matrix`."""
    m = check_index(m, "m")
    n = check_index(n, "n")
    return complex(rho_series_matrix(params, max(m, n) + 1, Jmax, phi=phi)[m, n])


# ---------------------------------------------------------------------------
# special slices


def displaced_helstrom_coeff(m: int, n: int, alpha, nbar: float) -> complex:
    """Displaced thermal state (no squeezing) in Laguerre form.

    For ``n >= m``::

        rho_{m,n} = exp(-|alpha|^2/(N+1)) N^n / (N+1)^(n+1) sqrt(m!/n!)
                    (conj(alpha)/N)^(n-m) L_m^{(n-m)}(-|alpha|^2 / (N (N+1)))

    and Hermitian symmetry for ``m > n``. The ``1/(N+1)`` factor is what
    makes ``alpha = 0`` reproduce the thermal state.
    """
    m = check_index(m, "m")
    n = check_index(n, "n")
    alpha = as_complex(alpha, "alpha")
    nbar = as_real(nbar, "nbar", nonnegative=True)
    if nbar == 0:
        raise DomainError("the Laguerre form needs nbar > 0")
    if m > n:
        return displaced_helstrom_coeff(n, m, alpha, nbar).conjugate()
    lf = log_factorials(n)
    a2 = abs(alpha) ** 2
    log_mag = (
        -a2 / (nbar + 1) + m * math.log(nbar) - (n + 1) * math.log(nbar + 1) + 0.5 * float(lf[m] - lf[n])
    )
    lag = laguerre_generalized(m, n - m, -a2 / (nbar * (nbar + 1)))
    return math.exp(log_mag) * alpha.conjugate() ** (n - m) * lag


def displaced_KW_coeff(m: int, n: int, alpha, nbar: float) -> complex:
    """Displaced thermal state from the ``J K W K^dagger`` form at zero squeezing.

    ``J = (1-Y) exp(-(1-Y)|alpha|^2)``,
    ``K_{m,r} = sqrt(m!) alpha^(m-r) / ((m-r)! r!)`` and
    ``W_{r,s} = r! s! alpha^r conj(alpha)^s sum_k (-1)^(r+s) Y^(r+s-k) |alpha|^(-2k) / ((r-k)! k! (s-k)!)``.
    """
    m = check_index(m, "m")
    n = check_index(n, "n")
    alpha = as_complex(alpha, "alpha")
    nbar = as_real(nbar, "nbar", nonnegative=True)
    if alpha == 0:
        raise DomainError("alpha = 0 is the thermal state; use thermal_coeff")
    al = CEXT(alpha)
    a2 = np.abs(al) ** 2
    Y = EXT(nbar) / (EXT(nbar) + 1)
    lf = log_factorials(max(m, n))

    def K(row, r):
        return np.exp(0.5 * lf[row] - lf[row - r] - lf[r]) * _ext_pow(al, row - r)

    def W(r, s):
        acc = _Accumulator()
        for k in range(min(r, s) + 1):
            acc.add(_ext_pow(Y, r + s - k) * a2 ** (-k) * np.exp(-lf[r - k] - lf[k] - lf[s - k]))
        sign = -1 if (r + s) % 2 else 1
        return sign * np.exp(lf[r] + lf[s]) * _ext_pow(al, r) * _ext_pow(np.conj(al), s) * acc.value[()]

    J = (1 - Y) * np.exp(-(1 - Y) * a2)
    acc = _Accumulator()
    for r in range(m + 1):
        for s in range(n + 1):
            acc.add(K(m, r) * W(r, s) * np.conj(K(n, s)))
    return complex(J * acc.value[()])


def squeezed_special_coeff(m: int, n: int, r: float, theta: float, nbar: float) -> complex:
    """Squeezed thermal state (no displacement) through the degenerate polynomial forms.

    With ``x = z_poly = 0`` only even offsets survive:
    ``K_{m,k} = sqrt(m!) y^((m-k)/2) S^k / (((m-k)/2)! k!)`` for ``m - k`` even,
    ``W_{k,l} = H_{k,l}(0, a; 0, conj(a) | b)``, and ``J = (1 - Y) sqrt(L) sech r``.
    Entries with ``m`` and ``n`` of different parity vanish.
    """
    m = check_index(m, "m")
    n = check_index(n, "n")
    params = StateParams(0j, r, theta, nbar)
    if (m - n) % 2:
        return 0j
    d = _derive_ext(params)
    lf = log_factorials(max(m, n))
    y = as_ext(d.ordering.y)
    S = EXT(d.ordering.S)
    a, b = as_ext(d.a), as_ext(d.b)

    def K(row, k):
        half = (row - k) // 2
        return np.exp(0.5 * lf[row] - lf[half] - lf[k]) * _ext_pow(y, half) * S**k

    def W(k, l):
        # H_j(0, v) / j! = v^(j/2) / (j/2)! for even j
        acc = _Accumulator()
        for q in range(min(k, l) + 1):
            if (k - q) % 2 or (l - q) % 2:
                continue
            hk, hl = (k - q) // 2, (l - q) // 2
            acc.add(
                _ext_pow(a, hk)
                * _ext_pow(np.conj(a), hl)
                * _ext_pow(b, q)
                * np.exp(lf[k] + lf[l] - lf[hk] - lf[hl] - lf[q])
            )
        return acc.value[()]

    J = (1 - d.Y) * np.sqrt(d.L) * S
    acc = _Accumulator()
    for k in range(m % 2, m + 1, 2):
        for l in range(n % 2, n + 1, 2):
            acc.add(K(m, k) * W(k, l) * np.conj(K(n, l)))
    return complex(J * acc.value[()])


def pure_coeff(m: int, n: int, alpha, r: float, theta: float) -> complex:
    """Pure Gaussian state: ``|K0|^2 H_m(x, y) conj(H_n(x, y)) / sqrt(m! n!)``."""
    m = check_index(m, "m")
    n = check_index(n, "n")
    op = _ordering_ext(BosonicParams(alpha, 0.0, r, theta))
    lf = log_factorials(max(m, n))
    x, y = as_ext(op.x), as_ext(op.y)
    v = _hkdf_vector_ext(max(m, n), x, y, 0.5 * lf[: max(m, n) + 1])
    return complex(np.abs(op.K0) ** 2 * v[m] * np.conj(v[n]))


def pure_state_vector(alpha, r: float, theta: float, dim: int) -> np.ndarray:
    """``v_m = K0 H_m(x, y) / sqrt(m!)`` so that the pure state is ``v v^dagger``."""
    dim = check_dim(dim)
    op = _ordering_ext(BosonicParams(alpha, 0.0, r, theta))
    lf = log_factorials(dim)
    v = _hkdf_vector_ext(dim - 1, as_ext(op.x), as_ext(op.y), 0.5 * lf[:dim])
    return (as_ext(op.K0) * v).astype(complex)


def photon_distribution(params: StateParams, m_max: int, *, method: str = "auto") -> PhotonDistribution:
    """Photon-number probabilities ``rho_{m,m}`` for ``m = 0..m_max`` and their sum.

    ``method`` is passed to :func:`rho_matrix`.
    """
    m_max = check_index(m_max, "m_max")
    rho = rho_matrix(params, m_max + 1, method=method)
    probs = np.real(np.diagonal(rho)).copy()
    return PhotonDistribution(probs, float(math.fsum(probs)))
