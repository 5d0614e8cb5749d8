"""Asymptotic series, order-of-magnitude estimation and Euler's divergent series.

The gauge functions are integer powers ``eps**n`` starting at an arbitrary
(possibly negative) index ``n0``.  Coefficients may be ``int``, ``Fraction``,
``float`` or ``complex``; when both the coefficients and ``eps`` are exact
rationals the partial sums are exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import integrate

from .errors import DomainError

# Integer factorials are exact for every n we allow; 20! still fits in a signed 64-bit word.
MAX_EULER_INDEX = 20

# Truncation point of the Euler integral; the neglected tail is below exp(-50) ~ 2e-22.
_EULER_CUTOFF = 50.0


@dataclass(frozen=True)
class GaugeSequence:
    """Integer-power gauge ``delta_n(eps) = eps**n`` for ``n >= n0``."""

    n0: int = 0

    def __call__(self, n: int, eps):
        if n < self.n0:
            raise IndexError(f"gauge index {n} below start index {self.n0}")
        return eps**n

    def ratio(self, n: int, eps):
        """``delta_{n+1}(eps) / delta_n(eps)``; tends to zero with eps."""
        return self(n + 1, eps) / self(n, eps)


@dataclass(frozen=True)
class AsymptoticSeries:
    coeffs: tuple
    gauge: GaugeSequence = field(default_factory=GaugeSequence)

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise ValueError("an asymptotic series needs at least one coefficient")
        for c in coeffs:
            if not isinstance(c, Number) or not np.isfinite(complex(c)):
                raise ValueError(f"coefficient {c!r} is not a finite number")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, n0: int = 0) -> "AsymptoticSeries":
        return cls(tuple(coeffs), GaugeSequence(n0))

    @property
    def n0(self) -> int:
        return self.gauge.n0

    @property
    def last_index(self) -> int:
        return self.n0 + len(self.coeffs) - 1

    def coeff(self, n: int):
        if not self.n0 <= n <= self.last_index:
            raise IndexError(f"index {n} outside [{self.n0}, {self.last_index}]")
        return self.coeffs[n - self.n0]

    def term(self, n: int, eps):
        return self.coeff(n) * self.gauge(n, eps)

    def partial_sum(self, eps, m: int | None = None):
        return evaluate_partial_sum(self, eps, self.last_index if m is None else m)

    def __len__(self) -> int:
        return len(self.coeffs)


def evaluate_partial_sum(series: AsymptoticSeries, eps, m: int):
    """Return ``sum_{n=n0}^{m} a_n eps**n``, accumulated in ascending order of n.

    Exact when ``eps`` and the coefficients are rationals.
    """
    if not series.n0 <= m <= series.last_index:
        raise IndexError(f"truncation index {m} outside [{series.n0}, {series.last_index}]")
    if eps <= 0:
        raise DomainError("eps must be positive")
    total = 0
    for n in range(series.n0, m + 1):
        total = total + series.coeff(n) * series.gauge(n, eps)
    return total


class OrderClass(enum.Enum):
    BIG_O = "BigO"
    LITTLE_O = "LittleO"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class OrderVerdict:
    classification: OrderClass
    ratio_trace: tuple  # ((eps, |f/g|), ...) in the order sampled

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r for _, r in self.ratio_trace])


def default_eps_grid(start: float = 1e-1, ratio: float = 0.5, points: int = 12) -> np.ndarray:
    return start * ratio ** np.arange(points)


def estimate_order(
    f: Callable[[float], float],
    g: Callable[[float], float],
    eps_grid: Sequence[float] | None = None,
    *,
    tail: int = 4,
    shrink: float = 1.5,
    flat_tol: float = 0.05,
) -> OrderVerdict:
    """Classify ``f`` against ``g`` from the behaviour of ``|f/g|`` as eps -> 0.

    ``LittleO`` when each of the last ``tail`` ratio steps shrinks by at least
    ``shrink``; ``BigO`` when the tail settles to a finite nonzero value
    (relative spread below ``flat_tol`` and the step-to-step changes not
    growing); otherwise ``Inconclusive``.
    """
    grid = default_eps_grid() if eps_grid is None else np.asarray(eps_grid, dtype=float)
    if grid.size < 6:
        raise ValueError("need at least 6 grid points")
    if np.any(grid <= 0) or np.any(np.diff(grid) >= 0):
        raise ValueError("eps grid must be positive and strictly decreasing")

    trace = []
    for eps in grid:
        gv = g(float(eps))
        if gv == 0:
            raise DomainError(f"g vanishes at eps={eps}")
        trace.append((float(eps), abs(f(float(eps)) / gv)))
    r = np.array([v for _, v in trace])
    tail_r = r[-(tail + 1):]

    if np.all(tail_r[1:] > 0) and np.all(tail_r[:-1] / tail_r[1:] >= shrink):
        verdict = OrderClass.LITTLE_O
    elif np.all(tail_r == 0):
        verdict = OrderClass.LITTLE_O
    else:
        level = tail_r[-1]
        spread = np.ptp(tail_r) / level if level > 0 else np.inf
        steps = np.abs(np.diff(tail_r))
        settling = np.all(steps[1:] <= steps[:-1] * 1.01 + 1e-300)
        if level > 0 and np.isfinite(level) and spread < flat_tol and settling:
            verdict = OrderClass.BIG_O
        else:
            verdict = OrderClass.INCONCLUSIVE
    return OrderVerdict(verdict, tuple(trace))


# --- Euler's example -------------------------------------------------------


def euler_f(eps, dps: int | None = None):
    """``f(eps) = int_0^inf exp(-t) / (1 + eps t) dt``.

    With ``dps=None`` this is a double-precision adaptive Gauss-Kronrod
    quadrature on ``[0, 50]`` (tail below ``exp(-50)``).  Passing ``dps``
    evaluates the same integral with mpmath at that many decimal digits,
    moving the cutoff so the tail stays below ``10**-dps``.
    """
    if eps <= 0:
        raise DomainError("euler_f is defined here for eps > 0")
    if dps is None:
        eps = float(eps)
        val, _ = integrate.quad(
            lambda t: math.exp(-t) / (1.0 + eps * t),
            0.0,
            _EULER_CUTOFF,
            epsabs=1e-15,
            epsrel=1e-13,
            limit=200,
        )
        return val
    with mpmath.workdps(dps + 10):
        if isinstance(eps, Fraction):
            e = mpmath.mpf(eps.numerator) / eps.denominator
        else:
            e = mpmath.mpf(eps)
        cutoff = mpmath.mpf(max(_EULER_CUTOFF, (dps + 5) * math.log(10)))
        # Split points keep the tanh-sinh rule well conditioned near the origin.
        pts = [0, 1, 4, 16, cutoff]
        val = mpmath.quad(lambda t: mpmath.exp(-t) / (1 + e * t), pts)
        return +val


def euler_series_coeff(n: int) -> int:
    """``(-1)**n * n!``, the n-th coefficient of Euler's divergent series."""
    if n < 0:
        raise DomainError("coefficient index must be nonnegative")
    if n > MAX_EULER_INDEX:
        raise OverflowError(f"n={n} exceeds the supported factorial range (<= {MAX_EULER_INDEX})")
    return (-1) ** n * math.factorial(n)


def euler_series(m: int) -> AsymptoticSeries:
    """Euler's series truncated after the ``eps**m`` term."""
    return AsymptoticSeries.from_coeffs([euler_series_coeff(n) for n in range(m + 1)], n0=0)


def euler_remainder_bound(eps, m: int):
    """Upper bound ``(m+1)! eps**(m+1)`` on ``|f(eps) - S_m(eps)|``."""
    return math.factorial(m + 1) * eps ** (m + 1)


def optimal_truncation(series: AsymptoticSeries, eps) -> int:
    """Largest m for which the term magnitudes decrease strictly up to m.

    Ties stop the scan, so the smaller index wins.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    m = series.n0
    prev = abs(series.term(m, eps))
    for n in range(series.n0 + 1, series.last_index + 1):
        cur = abs(series.term(n, eps))
        if not cur < prev:
            break
        m, prev = n, cur
    return m


def richardson_limit(eps_values: Sequence[float], values: Sequence[float]) -> float:
    """Extrapolate ``values(eps)`` to eps = 0 with Neville's polynomial scheme."""
    x = np.asarray(eps_values, dtype=float)
    p = np.asarray(values, dtype=float).copy()
    n = len(x)
    for level in range(1, n):
        for i in range(n - level):
            j = i + level
            p[i] = (x[j] * p[i] - x[i] * p[i + 1]) / (x[j] - x[i])
    return float(p[0])


def coefficients_by_limits(
    f: Callable[[float], float],
    count: int,
    eps_values: Sequence[float] = (1e-2, 1e-3, 1e-4, 1e-5),
    n0: int = 0,
) -> list[float]:
    """Recover leading coefficients of ``f`` in the integer-power gauge by limits.

    ``a_m = lim (f - sum_{n<m} a_n eps**n) / eps**m``, each limit estimated by
    Richardson extrapolation over ``eps_values``.
    """
    gauge = GaugeSequence(n0)
    fvals = [f(e) for e in eps_values]
    coeffs: list[float] = []
    for m in range(n0, n0 + count):
        quotients = []
        for e, fv in zip(eps_values, fvals):
            rem = fv - sum(a * gauge(n0 + i, e) for i, a in enumerate(coeffs))
            quotients.append(rem / gauge(m, e))
        coeffs.append(richardson_limit(eps_values, quotients))
    return coeffs
