"""Hermite-Kampé de Fériet polynomials and related identities.

Factorial ratios go through a table of ``ln(k!)``; no raw factorial is ever
formed. Sums are carried in extended precision (``numpy.longdouble``) with
Neumaier compensation, because the displaced and squeezed arguments make
neighbouring terms cancel heavily once indices reach a few dozen. Public
functions return ordinary double-precision values.
"""

from __future__ import annotations

import cmath
import math
import warnings

import numpy as np

from ._validation import (
    CEXT,
    EXT,
    SERIES_HARD_CAP,
    SeriesConvergenceWarning,
    SingularityError,
    as_complex,
    as_ext,
    check_index,
    log_factorials,
)

SINGULARITY_EPS = 1e-12
SERIES_RTOL = 1e-16
_SERIES_QUIET_TERMS = 3
_SERIES_GROWTH_TERMS = 10


def _neumaier_add(total, comp, term):
    new = total + term
    big = np.abs(total) >= np.abs(term)
    comp = comp + np.where(big, (total - new) + term, (term - new) + total)
    return new, comp


class _Accumulator:
    """Compensated complex accumulation in extended precision (per component)."""

    def __init__(self, shape=()):
        self._re = np.zeros(shape, dtype=EXT)
        self._im = np.zeros(shape, dtype=EXT)
        self._cre = np.zeros(shape, dtype=EXT)
        self._cim = np.zeros(shape, dtype=EXT)

    def add(self, term, index=...):
        term = np.asarray(term, dtype=CEXT)
        re, cre = _neumaier_add(self._re[index], self._cre[index], term.real)
        im, cim = _neumaier_add(self._im[index], self._cim[index], term.imag)
        self._re[index], self._cre[index] = re, cre
        self._im[index], self._cim[index] = im, cim
        return self

    @property
    def value(self) -> np.ndarray:
        return (self._re + self._cre) + 1j * (self._im + self._cim)


def _ext_sum(terms):
    acc = _Accumulator()
    for t in terms:
        acc.add(t)
    return acc.value[()]


def _csum(terms) -> complex:
    """Correctly rounded double-precision sum of complex terms."""
    terms = list(terms)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def _log_powers(v, k):
    """Log-magnitude and phase of ``v**k`` with ``0**0 = 1``."""
    k = np.asarray(k, dtype=EXT)
    if v == 0:
        return np.where(k == 0, EXT(0), EXT(-np.inf)), np.zeros_like(k)
    return k * np.log(np.abs(v)), k * np.angle(v)


def _ext_pow(v, k: int):
    if k == 0:
        return CEXT(1)
    if v == 0:
        return CEXT(0)
    return np.exp(k * np.log(CEXT(v)))


def _exp_log(logmag, phase=0):
    return np.exp(np.asarray(logmag, dtype=EXT) + 1j * np.asarray(phase, dtype=EXT))


# ---------------------------------------------------------------------------
# one-index polynomials


def _hkdf_ext(n: int, x, y):
    lf = log_factorials(n)
    lx, px = _log_powers(x, [n - 2 * r for r in range(n // 2 + 1)])
    terms = []
    for r in range(n // 2 + 1):
        ly, py = _log_powers(y, r)
        logmag = lf[n] - lf[n - 2 * r] - lf[r] + lx[r] + ly
        if logmag != -np.inf:
            terms.append(_exp_log(logmag, px[r] + py))
    return _ext_sum(terms)


def hkdf(n: int, x, y) -> complex:
    """Two-variable Hermite polynomial ``H_n(x, y)``.

    ``H_n(x, y) = n! * sum_r x**(n-2r) y**r / ((n-2r)! r!)`` for
    ``r = 0..floor(n/2)``; ``H_0 = 1``.
    """
    n = check_index(n)
    x = as_ext(x, "x")
    y = as_ext(y, "y")
    if n == 0:
        return 1 + 0j
    return complex(_hkdf_ext(n, x, y))


def hkdf_degenerate(n: int, x) -> complex:
    """``H_n(x, 0) = x**n``."""
    n = check_index(n)
    return as_complex(x, "x") ** n


def hkdf_degenerate_y(n: int, y) -> complex:
    """``H_n(0, y)``: ``y**(n/2) n!/(n/2)!`` for even n, zero for odd n."""
    n = check_index(n)
    y = as_complex(y, "y")
    if n % 2:
        return 0j
    lf = log_factorials(n)
    return float(np.exp(lf[n] - lf[n // 2])) * y ** (n // 2)


def _hkdf_vector_ext(nmax: int, x, y, log_weight=None):
    lf = log_factorials(nmax)
    n = np.arange(nmax + 1)
    if log_weight is None:
        weight = lf[: nmax + 1]
    else:
        weight = np.broadcast_to(np.asarray(log_weight, dtype=EXT), (nmax + 1,))
    acc = _Accumulator(nmax + 1)
    for r in range(nmax // 2 + 1):
        k = n[2 * r :] - 2 * r
        lx, px = _log_powers(x, k)
        ly, py = _log_powers(y, r)
        acc.add(_exp_log(weight[2 * r :] - lf[k] - lf[r] + lx + ly, px + py), slice(2 * r, None))
    return acc.value


def hkdf_vector(nmax: int, x, y, log_weight=None, *, limit: int | None = None) -> np.ndarray:
    """Evaluate ``H_0 .. H_nmax`` at ``(x, y)`` with an optional reweighting.

    Parameters
    ----------
    nmax : int
        Highest index.
    x, y : complex
        Polynomial arguments.
    log_weight : array_like, optional
        Length ``nmax + 1`` (or scalar). Replaces the ``ln(n!)`` prefactor of
        each entry, so ``log_weight = 0`` returns ``H_n / n!`` and
        ``0.5 * ln(n!)`` returns ``H_n / sqrt(n!)``. Terms are exponentiated
        only after the weight is applied, which keeps huge and tiny factors
        from meeting in floating point.
    limit : int, optional
        Index cap; defaults to the configured maximum index.

    Returns
    -------
    numpy.ndarray
        Complex array of shape ``(nmax + 1,)``.
    """
    nmax = check_index(nmax, "nmax", limit=limit)
    return _hkdf_vector_ext(nmax, as_ext(x, "x"), as_ext(y, "y"), log_weight).astype(complex)


# ---------------------------------------------------------------------------
# two-index polynomials


def _hkdf2_ext(m: int, n: int, x, y, z, u, tau, log_scale=0.0, hx=None, hz=None):
    # hx, hz: optional precomputed H_k(x, y)/k! and H_k(z, u)/k! of sufficient length
    lf = log_factorials(max(m, n))
    if hx is None:
        hx = _hkdf_vector_ext(m, x, y, 0.0)
    if hz is None:
        hz = _hkdf_vector_ext(n, z, u, 0.0)
    terms = []
    for r in range(min(m, n) + 1):
        core = hx[m - r] * hz[n - r] * _ext_pow(tau, r)
        if core != 0:
            terms.append(np.exp(lf[m] + lf[n] - lf[r] - EXT(log_scale) + np.log(core)))
    return _ext_sum(terms)


def hkdf2(m: int, n: int, x, y, z, u, tau, *, log_scale: float = 0.0) -> complex:
    """Two-index polynomial ``H_{m,n}(x, y; z, u | tau)``.

    Sum over ``r <= min(m, n)`` of
    ``m! n! H_{m-r}(x,y) H_{n-r}(z,u) tau**r / ((m-r)! r! (n-r)!)``.
    The result is multiplied by ``exp(-log_scale)`` before it is rounded,
    so normalised values stay finite at high index.
    """
    m = check_index(m, "m")
    n = check_index(n, "n")
    args = [as_ext(v, name) for v, name in zip((x, y, z, u, tau), ("x", "y", "z", "u", "tau"))]
    return complex(_hkdf2_ext(m, n, *args, log_scale=log_scale))


def hkdf2_rotation_degenerate(m: int, n: int, X) -> complex:
    """``H_{m,n}(0, 0; 0, 0 | X) = delta_{mn} n! X**n``."""
    m = check_index(m, "m")
    n = check_index(n, "n")
    X = as_complex(X, "X")
    if m != n:
        return 0j
    return float(np.exp(log_factorials(n)[n])) * X**n


def _hkdf2_normalized_ext(mmax: int, nmax: int, x, y, z, u, tau):
    # Three-term recurrence from d/dt of the generating function,
    #   H_{m+1,n} = x H_{m,n} + 2y m H_{m-1,n} + tau n H_{m,n-1},
    # divided through by sqrt((m+1)! n!). Unlike the explicit sum it has no
    # alternating cancellation, so it stays accurate at large indices.
    x, y, z, u, tau = (CEXT(v) for v in (x, y, z, u, tau))
    out = np.zeros((mmax + 1, nmax + 1), dtype=CEXT)
    sq = np.sqrt(np.arange(max(mmax, nmax) + 2, dtype=EXT))
    row = out[0]
    row[0] = 1
    for n in range(nmax):
        row[n + 1] = z * row[n] / sq[n + 1]
        if n:
            row[n + 1] += 2 * u * sq[n] * row[n - 1] / sq[n + 1]
    sqn = sq[: nmax + 1]
    for m in range(mmax):
        nxt = x * out[m]
        if m:
            nxt += 2 * y * sq[m] * out[m - 1]
        nxt[1:] += tau * sqn[1:] * out[m, :-1]
        out[m + 1] = nxt / sq[m + 1]
    return out


def _hkdf2_normalized_sum_ext(mmax: int, nmax: int, x, y, z, u, tau):
    lf = log_factorials(max(mmax, nmax))
    acc = _Accumulator((mmax + 1, nmax + 1))
    rmax = min(mmax, nmax) if tau != 0 else 0
    for r in range(rmax + 1):
        km = np.arange(mmax - r + 1)
        kn = np.arange(nmax - r + 1)
        left = _hkdf_vector_ext(mmax - r, x, y, 0.5 * (lf[km + r] - lf[r]))
        right = _hkdf_vector_ext(nmax - r, z, u, 0.5 * (lf[kn + r] - lf[r]))
        acc.add(_ext_pow(tau, r) * np.outer(left, right), (slice(r, None), slice(r, None)))
    return acc.value


def hkdf2_normalized(mmax: int, nmax: int, x, y, z, u, tau, *, limit: int | None = None) -> np.ndarray:
    """Matrix of ``H_{m,n}(x, y; z, u | tau) / sqrt(m! n!)``.

    Shape ``(mmax + 1, nmax + 1)``. Built row by row from the normalised
    three-term recurrence, so no factorial is formed and no alternating sum
    is taken; the result stays accurate well past the point where the
    explicit sum in :func:`hkdf2` loses its digits.
    """
    mmax = check_index(mmax, "mmax", limit=limit)
    nmax = check_index(nmax, "nmax", limit=limit)
    args = [as_ext(v, name) for v, name in zip((x, y, z, u, tau), ("x", "y", "z", "u", "tau"))]
    return _hkdf2_normalized_ext(mmax, nmax, *args).astype(complex)


def incomplete_hermite(eps: int, m: int, n: int, x, y, tau) -> complex:
    """Even (``eps=0``) or odd (``eps=1``) incomplete Hermite polynomial.

    ``(m+eps)! (n+eps)! * sum_r x**(m-r) y**(n-r) tau**(2r+2eps)
    / ((m-r)! (n-r)! (2r+eps)!)`` over ``r <= min(m, n)``.
    """
    if eps not in (0, 1):
        raise ValueError(f"eps must be 0 or 1, got {eps!r}")
    m = check_index(m, "m")
    n = check_index(n, "n")
    x, y, tau = as_ext(x, "x"), as_ext(y, "y"), as_ext(tau, "tau")
    lf = log_factorials(2 * max(m, n) + 2)
    terms = []
    for r in range(min(m, n) + 1):
        core = _ext_pow(x, m - r) * _ext_pow(y, n - r) * _ext_pow(tau, 2 * r + 2 * eps)
        if core != 0:
            weight = lf[m + eps] + lf[n + eps] - lf[m - r] - lf[n - r] - lf[2 * r + eps]
            terms.append(np.exp(weight + np.log(core)))
    return complex(_ext_sum(terms))


# ---------------------------------------------------------------------------
# series and closed forms


def _truncate_series(terms, fixed: bool) -> tuple[complex, int]:
    """Apply the relative-tail stopping rule; returns (sum, number of terms used)."""
    used = len(terms)
    if not fixed:
        running = 0j
        quiet = 0
        for i, t in enumerate(terms):
            running += complex(t)
            if abs(t) < SERIES_RTOL * abs(running):
                quiet += 1
                if quiet >= _SERIES_QUIET_TERMS:
                    used = i + 1
                    break
            else:
                quiet = 0
    return complex(_ext_sum(terms[:used])), used


def _warn_if_growing(terms, label: str) -> None:
    mags = np.abs(np.asarray(terms))
    # compare with the term two steps back so that series whose odd terms
    # are tiny (or vanish) still register growth
    streak = 0
    for prev, cur in zip(mags[:-2], mags[2:]):
        streak = streak + 1 if cur > prev else 0
        if streak >= _SERIES_GROWTH_TERMS:
            warnings.warn(
                f"{label}: terms grew over {_SERIES_GROWTH_TERMS} consecutive indices",
                SeriesConvergenceWarning,
                stacklevel=3,
            )
            return


def _powers_ext(t, count: int):
    lt, pt = _log_powers(t, np.arange(count))
    return _exp_log(lt, pt)


def gen_func_truncated(x, y, t, N: int) -> tuple[complex, float]:
    """Partial sum of ``sum_n t**n / n! H_n(x, y)`` over ``n < N``.

    Returns the partial sum and the magnitude of its last term; the full
    series equals ``exp(t*x + t**2 * y)``.
    """
    N = check_index(N, "N", limit=SERIES_HARD_CAP)
    if N == 0:
        return 0j, 0.0
    h = _hkdf_vector_ext(N - 1, as_ext(x, "x"), as_ext(y, "y"), 0.0)
    terms = h * _powers_ext(as_ext(t, "t"), N)
    return complex(_ext_sum(terms)), float(abs(terms[-1]))


def mehler_closed(x, y, z, v, t, eps: float = SINGULARITY_EPS) -> complex:
    """Closed form of ``sum_n t**n/n! H_n(x,y) H_n(z,v)``.

    ``(1 - 4 y t**2 v)**(-1/2) * exp((x t z + t**2 (x**2 v + y z**2)) / (1 - 4 y t**2 v))``,
    principal square root. Raises :class:`SingularityError` when the
    denominator is within ``eps`` of zero.
    """
    x, y, z, v, t = (as_complex(a, s) for a, s in zip((x, y, z, v, t), "xyzvt"))
    denom = 1 - 4 * y * t * t * v
    if abs(denom) < eps:
        raise SingularityError(f"|1 - 4 y t^2 v| = {abs(denom):.3g} is below {eps:g}")
    return cmath.exp((x * t * z + t * t * (x * x * v + y * z * z)) / denom) / cmath.sqrt(denom)


def mehler_series(x, y, z, v, t, N: int | None = None) -> complex:
    """Truncated Mehler series ``sum_n t**n/n! H_n(x,y) H_n(z,v)``.

    With ``N`` given, exactly ``N`` terms are summed. Otherwise summation
    stops once three consecutive terms fall below ``1e-16`` of the running
    sum (at most 500 terms). Emits :class:`SeriesConvergenceWarning` when
    the terms keep growing.
    """
    fixed = N is not None
    count = check_index(N, "N", limit=SERIES_HARD_CAP) if fixed else SERIES_HARD_CAP
    if count == 0:
        return 0j
    half = 0.5 * log_factorials(count)[:count]
    left = _hkdf_vector_ext(count - 1, as_ext(x, "x"), as_ext(y, "y"), half)
    right = _hkdf_vector_ext(count - 1, as_ext(z, "z"), as_ext(v, "v"), half)
    terms = left * right * _powers_ext(as_ext(t, "t"), count)
    _warn_if_growing(terms, "mehler_series")
    value, _ = _truncate_series(terms, fixed)
    return value


def mixed_deriv_quadexp(m: int, n: int, a, b, c, x, y) -> complex:
    """``d^m/dx^m d^n/dy^n exp(a x^2 + b x y + c y^2)`` in closed form.

    Equals ``H_{m,n}(2ax + by, a; 2cy + bx, c | b) * exp(a x^2 + b x y + c y^2)``.
    """
    m = check_index(m, "m")
    n = check_index(n, "n")
    a, b, c, x, y = (as_complex(q, s) for q, s in zip((a, b, c, x, y), "abcxy"))
    base = cmath.exp(a * x * x + b * x * y + c * y * y)
    if m == 0 and n == 0:
        return base
    return hkdf2(m, n, 2 * a * x + b * y, a, 2 * c * y + b * x, c, b) * base


def laguerre_generalized(n: int, k: int, x) -> complex:
    """Generalized Laguerre polynomial ``L_n^{(k)}(x)`` for integer ``k >= -n``.

    Explicit sum ``sum_j (-1)**j C(n+k, n-j) x**j / j!``.
    """
    n = check_index(n)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise TypeError(f"k must be an integer, got {type(k).__name__}")
    k = int(k)
    if n + k < 0:
        raise ValueError(f"k={k} must satisfy k >= -n = {-n}")
    x = as_ext(x, "x")
    lf = log_factorials(n + abs(k))
    terms = []
    for j in range(n + 1):
        if n - j > n + k:
            continue  # binomial vanishes
        core = _ext_pow(-x, j)
        if core != 0:
            # C(n+k, n-j) / j!
            terms.append(np.exp(lf[n + k] - lf[n - j] - lf[k + j] - lf[j]) * core)
    return complex(_ext_sum(terms))
