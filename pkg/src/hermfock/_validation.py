"""Input validation helpers and shared numerical limits."""

from __future__ import annotations

import math
import numbers
import os
from functools import lru_cache

import numpy as np

DEFAULT_MAX_INDEX = 120
SERIES_HARD_CAP = 500


class IndexBoundsError(ValueError):
    """A polynomial or Fock index is negative or above the configured cap."""


class SingularityError(ArithmeticError):
    """A closed form is evaluated at (or numerically too close to) a pole."""


class DomainError(ValueError):
    """Parameters fall outside the slice a special-case formula covers."""


class SeriesConvergenceWarning(RuntimeWarning):
    """A truncated series did not show decaying terms."""


class ConditioningWarning(RuntimeWarning):
    """Rounding error of a factored product may exceed the requested accuracy."""


def max_index() -> int:
    """Index cap, overridable through the ``FOCK_MAX_INDEX`` environment variable."""
    raw = os.environ.get("FOCK_MAX_INDEX")
    if raw is None:
        return DEFAULT_MAX_INDEX
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"FOCK_MAX_INDEX must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("FOCK_MAX_INDEX must be positive")
    return value


def check_index(n, name: str = "n", limit: int | None = None) -> int:
    if isinstance(n, (bool, np.bool_)) or not isinstance(n, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(n).__name__}")
    n = int(n)
    cap = max_index() if limit is None else limit
    if n < 0:
        raise IndexBoundsError(f"{name}={n} is negative")
    if n > cap:
        raise IndexBoundsError(f"{name}={n} exceeds the index cap {cap}")
    return n


def check_dim(dim, name: str = "dim") -> int:
    """Truncation dimensions run over indices 0..dim-1."""
    dim = check_index(dim, name, limit=max_index() + 1)
    if dim < 1:
        raise IndexBoundsError(f"{name} must be at least 1")
    return dim


def as_complex(value, name: str = "value") -> complex:
    try:
        c = complex(value)
    except (TypeError, ValueError) as exc:
        raise TypeError(f"{name} must be a complex number, got {value!r}") from exc
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"{name} must be finite, got {c}")
    return c


def as_real(value, name: str = "value", nonnegative: bool = False) -> float:
    if isinstance(value, complex):
        if value.imag != 0:
            raise TypeError(f"{name} must be real, got {value}")
        value = value.real
    try:
        x = float(value)
    except (TypeError, ValueError) as exc:
        raise TypeError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x}")
    if nonnegative and x < 0:
        raise ValueError(f"{name} must be non-negative, got {x}")
    return x


def reduce_angle(angle: float) -> float:
    """Map an angle into (-pi, pi]."""
    reduced = math.remainder(angle, 2 * math.pi)
    if reduced <= -math.pi:
        reduced += 2 * math.pi
    return reduced


EXT = np.longdouble
CEXT = np.clongdouble


@lru_cache(maxsize=8)
def log_factorial_table(nmax: int) -> np.ndarray:
    """ln(k!) for k = 0..nmax in extended precision, read-only."""
    logs = np.log(np.arange(1, nmax + 1, dtype=EXT))
    table = np.concatenate([np.zeros(1, dtype=EXT), np.cumsum(logs)])
    table.setflags(write=False)
    return table


def log_factorials(nmax: int) -> np.ndarray:
    # share one cached table across callers, growing in powers of two
    size = max(DEFAULT_MAX_INDEX, SERIES_HARD_CAP)
    while size < nmax:
        size *= 2
    return log_factorial_table(size)


def as_ext(value, name: str = "value"):
    """Complex scalar in extended precision; extended inputs keep their digits."""
    if isinstance(value, (np.clongdouble, np.longdouble)):
        c = CEXT(value)
        if not np.isfinite(c):
            raise ValueError(f"{name} must be finite, got {c}")
        return c
    return CEXT(as_complex(value, name))
