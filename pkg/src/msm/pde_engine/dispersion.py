"""Dispersion relations of the two model wave equations and phase-matching search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ..errors import DomainError, PreconditionError

SCAN_POINTS = 10_000
ROOT_XTOL = 1e-12


@dataclass(frozen=True)
class DispersionRelation:
    """``omega(k)`` with closed-form first and second derivatives.

    ``symbol(q)`` is the linear operator of the full field equation in Fourier
    space, ``u_tt = -symbol(q) u``; it equals ``omega(q)**2``.
    """

    name: str
    omega: Callable
    domega: Callable
    d2omega: Callable
    k_min: float = -np.inf
    k_max: float = np.inf

    def symbol(self, q):
        return self.omega(q) ** 2

    def check_domain(self, k):
        k = np.asarray(k, dtype=float)
        if np.any(k < self.k_min) or np.any(k > self.k_max) or not np.all(np.isfinite(k)):
            raise DomainError(f"k outside [{self.k_min}, {self.k_max}] for {self.name}")


def _kg_omega(k):
    return np.sqrt(1.0 + np.asarray(k, dtype=float) ** 2)


def _kg_domega(k):
    return np.asarray(k, dtype=float) / _kg_omega(k)


def _kg_d2omega(k):
    return 1.0 / _kg_omega(k) ** 3


def klein_gordon() -> DispersionRelation:
    """``u_tt - u_xx + u = eps u**2``: ``omega = sqrt(1 + k**2)``."""
    return DispersionRelation("klein_gordon", _kg_omega, _kg_domega, _kg_d2omega)


def _fo_omega(k):
    k = np.asarray(k, dtype=float)
    return np.sqrt(k**4 - k**2 + 1.0)


def _fo_domega(k):
    k = np.asarray(k, dtype=float)
    return (2 * k**3 - k) / _fo_omega(k)


def _fo_d2omega(k):
    k = np.asarray(k, dtype=float)
    w = _fo_omega(k)
    w1 = (2 * k**3 - k) / w
    return (6 * k**2 - 1 - w1**2) / w


def fourth_order() -> DispersionRelation:
    """``u_tt + u_xx + u_xxxx + u = eps u**3``: ``omega = sqrt(k**4 - k**2 + 1)``."""
    return DispersionRelation("fourth_order", _fo_omega, _fo_domega, _fo_d2omega)


DISPERSIONS = {"klein_gordon": klein_gordon, "fourth_order": fourth_order}


def dispersion_eval(d: DispersionRelation, k: float):
    """``(omega(k), group velocity omega'(k))``."""
    d.check_domain(k)
    return float(d.omega(k)), float(d.domega(k))


def phase_matching_scan(d: DispersionRelation, n: int, k_range=(0.1, 10.0), points: int = SCAN_POINTS) -> list[float]:
    """All ``k`` in ``k_range`` with ``omega(n k) = n omega(k)``.

    Sign changes of ``g(k) = omega(n k) - n omega(k)`` on a uniform grid are
    refined by Brent's method; grid nodes where ``g`` vanishes exactly are
    reported as they are.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise PreconditionError("harmonic index must be an integer >= 2")
    lo, hi = map(float, k_range)
    if not lo < hi:
        raise PreconditionError("k_range must be an increasing interval")
    d.check_domain([lo, hi, n * lo, n * hi])

    def g(k):
        return d.omega(n * k) - n * d.omega(k)

    ks = np.linspace(lo, hi, points)
    gs = g(ks)
    roots: list[float] = []
    for i in range(points - 1):
        a, b = gs[i], gs[i + 1]
        if a == 0.0:
            roots.append(float(ks[i]))
        elif a * b < 0:
            roots.append(float(brentq(g, ks[i], ks[i + 1], xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)))
    if gs[-1] == 0.0:
        roots.append(float(ks[-1]))
    return roots
