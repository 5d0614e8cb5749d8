"""Direct numerical solutions and regular perturbation baselines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import DomainError, PreconditionError, StiffnessFailure

TOL_RANGE = (1e-13, 1e-6)


@dataclass(frozen=True)
class ReferenceProblem:
    """``y'' = F(t, y, y', eps)`` with ``y(0) = y0``, ``y'(0) = dy0`` on ``[0, t_end]``."""

    name: str
    accel: Callable  # (t, y, dy, eps) -> y''
    eps: float
    y0: float = 1.0
    dy0: float = 0.0
    t_end: float = 100.0

    def __post_init__(self):
        if not 0.0 <= self.eps <= 0.5:
            raise DomainError(f"eps={self.eps} outside [0, 0.5]")
        if self.t_end <= 0:
            raise DomainError("t_end must be positive")

    def rhs(self, t, z):
        return np.array([z[1], self.accel(t, z[0], z[1], self.eps)])


def damped_linear_problem(eps: float, t_end: float = 400.0, y0: float = 1.0, dy0: float = 0.0) -> ReferenceProblem:
    """``y'' + eps y' + y = 0``."""
    return ReferenceProblem("damped_linear", lambda t, y, dy, e: -e * dy - y, eps, y0, dy0, t_end)


def duffing_problem(eps: float, t_end: float = 100.0, y0: float = 1.0, dy0: float = 0.0) -> ReferenceProblem:
    """``y'' + y = eps y**3``."""
    return ReferenceProblem("duffing", lambda t, y, dy, e: -y + e * y**3, eps, y0, dy0, t_end)


def damped_quadratic_problem(eps: float, t_end: float = 20.0, y0: float = 1.0, dy0: float = 0.0) -> ReferenceProblem:
    """``y'' + y' + eps y**2 = 0``."""
    return ReferenceProblem("damped_quadratic", lambda t, y, dy, e: -dy - e * y**2, eps, y0, dy0, t_end)


class DenseTrajectory:
    """Dense solution ``y(t)``, ``y'(t)`` on the accepted step grid.

    ``interpolation="native"`` uses the integrator's own 7th-order continuous
    extension; ``"hermite"`` uses piecewise cubic Hermite interpolation through
    the accepted step values and slopes.
    """

    def __init__(self, t, z, dz, native=None, interpolation: str = "native"):
        self.t = np.asarray(t)
        self.z = np.asarray(z)
        self.dz = np.asarray(dz)
        self._native = native
        if interpolation not in ("native", "hermite"):
            raise ValueError(f"unknown interpolation {interpolation!r}")
        if interpolation == "native" and native is None:
            interpolation = "hermite"
        self.interpolation = interpolation

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def n_steps(self) -> int:
        return len(self.t) - 1

    def state(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t[0] - 1e-12) or np.any(t > self.t[-1] + 1e-12):
            raise DomainError("evaluation time outside the solved window")
        if self.interpolation == "native":
            return self._native(t)
        return self._hermite(t)

    def _hermite(self, t):
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        i = np.clip(np.searchsorted(self.t, tt, side="right") - 1, 0, len(self.t) - 2)
        t0, t1 = self.t[i], self.t[i + 1]
        h = t1 - t0
        s = (tt - t0) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s**2 * (3 - 2 * s)
        h11 = s**2 * (s - 1)
        out = (
            h00 * self.z[:, i]
            + h10 * h * self.dz[:, i]
            + h01 * self.z[:, i + 1]
            + h11 * h * self.dz[:, i + 1]
        )
        return out[:, 0] if scalar else out

    def __call__(self, t):
        return self.state(t)[0]


def rk_reference_solve(problem: ReferenceProblem, tol: float = 1e-12, interpolation: str = "native") -> DenseTrajectory:
    """Adaptive Dormand-Prince (8th order, embedded 5/3 error estimators) solution.

    Both relative and absolute tolerances are set to ``tol``.
    """
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise PreconditionError(f"tol={tol} outside {TOL_RANGE}")
    sol = solve_ivp(
        problem.rhs,
        (0.0, problem.t_end),
        [problem.y0, problem.dy0],
        method="DOP853",
        rtol=tol,
        atol=tol,
        dense_output=True,
    )
    if sol.status != 0:
        raise StiffnessFailure(f"{problem.name}: {sol.message}")
    dz = np.column_stack([problem.rhs(t, z) for t, z in zip(sol.t, sol.y.T)])
    return DenseTrajectory(sol.t, sol.y, dz, sol.sol, interpolation)


def regular_expansion_damped(t, eps):
    """First-order regular expansion of the damped oscillator with y(0)=1, y'(0)=0."""
    t = np.asarray(t, dtype=float)
    return np.cos(t) - 0.5 * eps * (np.sin(t) + t * np.cos(t))


def damped_linear_exact(t, eps, y0: float = 1.0, dy0: float = 0.0):
    """Closed-form solution of ``y'' + eps y' + y = 0`` for ``0 <= eps < 2``."""
    t = np.asarray(t, dtype=float)
    w = np.sqrt(1.0 - 0.25 * eps**2)
    c = (dy0 + 0.5 * eps * y0) / w
    return np.exp(-0.5 * eps * t) * (y0 * np.cos(w * t) + c * np.sin(w * t))


def bvp_regular_expansion(x, eps):
    """``y0 + eps y1`` for ``y' + y + eps y**2 = x``, ``y(1) = 1``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise DomainError("x must lie in [0, 1]")
    e1 = np.exp(1.0 - x)
    y0 = x - 1.0 + e1
    y1 = -(x**2) + 4.0 * x - 5.0 + (2.0 * x - x**2) * e1 + np.exp(2.0 - 2.0 * x)
    return y0 + eps * y1
