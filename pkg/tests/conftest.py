"""Shared fixtures and arbitrary-precision reference implementations.

The ``mp_*`` helpers re-derive each quantity straight from its defining
sum at 50 digits, independently of the library code.
"""

import os

import mpmath as mp
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

mp.mp.dps = 50

# reference sets: a displaced squeezed thermal state scanned over r and nbar
REF_ALPHA = 1 + 0.3j
REF_SETS = [{"alpha": REF_ALPHA, "r": r, "theta": 0.5, "nbar": 0.5} for r in (0.0, 0.5, 1.0)] + [
    {"alpha": REF_ALPHA, "r": 1.0, "theta": 0.5, "nbar": nb} for nb in (0.0, 0.5, 1.0, 2.0)
]


def mp_hkdf(n, x, y):
    x, y = mp.mpc(x), mp.mpc(y)
    return mp.factorial(n) * mp.fsum(
        x ** (n - 2 * r) * y**r / (mp.factorial(n - 2 * r) * mp.factorial(r)) for r in range(n // 2 + 1)
    )


def mp_hkdf2(m, n, x, y, z, u, tau):
    tau = mp.mpc(tau)
    return (
        mp.factorial(m)
        * mp.factorial(n)
        * mp.fsum(
            mp_hkdf(m - r, x, y)
            * mp_hkdf(n - r, z, u)
            * tau**r
            / (mp.factorial(m - r) * mp.factorial(r) * mp.factorial(n - r))
            for r in range(min(m, n) + 1)
        )
    )


def mp_ordering(alpha, phi, r, theta):
    alpha = mp.mpc(alpha)
    T = mp.expj(theta) * mp.tanh(r)
    S = 1 / mp.cosh(r)
    rot = mp.expj(phi)
    K0 = mp.sqrt(S) * mp.exp(-(abs(alpha) ** 2 + mp.conj(T) * alpha**2) / 2)
    return {
        "T": T,
        "S": S,
        "K0": K0,
        "x": alpha * S,
        "y": T / 2,
        "z": -(alpha * mp.conj(T) + mp.conj(alpha)) * rot,
        "u": -mp.conj(T) / 2 * rot**2,
        "X": S * rot,
    }


def mp_unitary(m, n, alpha, phi, r, theta):
    o = mp_ordering(alpha, phi, r, theta)
    return (
        o["K0"]
        * mp_hkdf2(m, n, o["x"], o["y"], o["z"], o["u"], o["X"])
        / mp.sqrt(mp.factorial(m) * mp.factorial(n))
    )


def mp_rho_series(m, n, alpha, r, theta, nbar, terms):
    """Thermal series over high-precision unitary coefficients."""
    Y = mp.mpf(nbar) / (mp.mpf(nbar) + 1)
    return (1 - Y) * mp.fsum(
        mp_unitary(m, j, alpha, 0, r, theta) * Y**j * mp.conj(mp_unitary(n, j, alpha, 0, r, theta))
        for j in range(terms)
    )


def to_c(value):
    return complex(value)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def mp_mixed_fd(m, n, a, b, c, x, y, h="1e-3"):
    """Richardson-extrapolated central differences of exp(a x^2 + b x y + c y^2)."""
    a, b, c, x, y = (mp.mpc(v) for v in (a, b, c, x, y))
    h = mp.mpf(h)

    def f(p, q):
        return mp.exp(a * p * p + b * p * q + c * q * q)

    def central(step):
        total = mp.mpc(0)
        for k in range(m + 1):
            for l in range(n + 1):
                sign = (-1) ** (k + l)
                total += (
                    sign
                    * mp.binomial(m, k)
                    * mp.binomial(n, l)
                    * f(x + (mp.mpf(m) / 2 - k) * step, y + (mp.mpf(n) / 2 - l) * step)
                )
        return total / step ** (m + n)

    coarse, fine = central(h), central(h / 2)
    return (4 * fine - coarse) / 3


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    def record(k, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
        ACCEPTANCE_LINES[k] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
