"""Amplitude equations from the method of multiple scales.

Every model carries its slow vector field split by order,
``dS/dt = eps f1(S) + eps**2 f2(S)``, together with the map back to ``y(t)``
and the residual used to fit initial data.  States are complex numpy arrays;
models with real amplitudes simply keep zero imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import DivergenceFailure, DomainError, FitFailure, PreconditionError

BLOWUP = 1e6
AMPLITUDE_RTOL = 1e-12
AMPLITUDE_ATOL = 1e-14


@dataclass(frozen=True)
class CarrierTerm:
    """``eps**power * coeff(S) * exp(i lam t)``, plus its conjugate unless self-conjugate."""

    lam: complex
    coeff: Callable
    power: int = 0
    self_conjugate: bool = False


@dataclass(frozen=True)
class ReconstructionMap:
    terms: tuple

    def complex_value(self, state, t, eps):
        """Sum of all terms before taking real parts; imaginary part should vanish."""
        t = np.asarray(t, dtype=float)
        total = np.zeros(np.broadcast(t, state[0]).shape, dtype=complex)
        for term in self.terms:
            z = eps**term.power * term.coeff(state) * np.exp(1j * term.lam * t)
            total = total + (z if term.self_conjugate else z + np.conj(z))
        return total

    def __call__(self, state, t, eps):
        return self.complex_value(state, t, eps).real


@dataclass(frozen=True)
class AmplitudeModel:
    name: str
    dim: int
    complex_state: bool
    f1: Callable
    f2: Callable | None
    reconstruction: ReconstructionMap
    ic_residual: Callable  # (state, eps, y0, dy0) -> 2 real residuals
    seed: Callable  # (y0, dy0) -> eps=0 state
    closed_form: Callable | None = None  # (state0, t, eps) -> state(t)
    notes: str = ""

    def vector_field(self, state, eps):
        out = eps * self.f1(state)
        if self.f2 is not None:
            out = out + eps**2 * self.f2(state)
        return out

    def first_order(self) -> "AmplitudeModel":
        """The same model with the eps**2 terms of the amplitude equation dropped."""
        return replace(self, name=self.name + "_first_order", f2=None, closed_form=_first_order_closed_form.get(self.name))


_first_order_closed_form: dict = {}


# --- damped linear oscillator ----------------------------------------------


def _damped_f1(s):
    return -0.5 * s


def _damped_f2(s):
    return -0.125j * s


def _damped_residual(s, eps, y0, dy0):
    a = s[0]
    dA = eps * _damped_f1(s)[0]
    return np.array([2 * a.real - y0, 2 * (1j * a + dA).real - dy0])


def damped_linear_model() -> AmplitudeModel:
    """``y'' + eps y' + y = 0``: ``A' = -eps A/2 - i eps**2 A/8``, ``y = A e^{it} + c.c.``"""
    return AmplitudeModel(
        name="damped_linear",
        dim=1,
        complex_state=True,
        f1=_damped_f1,
        f2=_damped_f2,
        reconstruction=ReconstructionMap((CarrierTerm(1.0, lambda s: s[0]),)),
        ic_residual=_damped_residual,
        seed=lambda y0, dy0: np.array([0.5 * (y0 - 1j * dy0)]),
        closed_form=lambda s0, t, eps: s0[:, None] * np.exp((-0.5 * eps - 0.125j * eps**2) * np.asarray(t)),
    )


_first_order_closed_form["damped_linear"] = lambda s0, t, eps: s0[:, None] * np.exp(-0.5 * eps * np.asarray(t))


# --- Duffing oscillator -----------------------------------------------------


def _duffing_f1(s):
    a = s[0]
    return np.array([-1.5j * abs(a) ** 2 * a])


def _duffing_f2(s):
    a = s[0]
    return np.array([-(15j / 16) * abs(a) ** 4 * a])


def _duffing_residual(s, eps, y0, dy0):
    # y = A e^{it} - eps A^3 e^{3it}/8 + c.c.; y' at t=0 keeps the O(eps) part of A'.
    a = s[0]
    y = 2 * (a - eps * a**3 / 8).real
    dy = 2 * (1j * a - eps * (1.5j * abs(a) ** 2 * a + 0.375j * a**3)).real
    return np.array([y - y0, dy - dy0])


def _duffing_closed(s0, t, eps, second=True):
    m = abs(s0[0]) ** 2
    rate = 1.5 * eps * m + (15 / 16 * eps**2 * m**2 if second else 0.0)
    return s0[:, None] * np.exp(-1j * rate * np.asarray(t))


def duffing_model() -> AmplitudeModel:
    """``y'' + y = eps y**3`` to second order in the amplitude equation."""
    return AmplitudeModel(
        name="duffing",
        dim=1,
        complex_state=True,
        f1=_duffing_f1,
        f2=_duffing_f2,
        reconstruction=ReconstructionMap(
            (
                CarrierTerm(1.0, lambda s: s[0]),
                CarrierTerm(3.0, lambda s: -s[0] ** 3 / 8, power=1),
            )
        ),
        ic_residual=_duffing_residual,
        seed=lambda y0, dy0: np.array([0.5 * (y0 - 1j * dy0)]),
        closed_form=_duffing_closed,
    )


_first_order_closed_form["duffing"] = lambda s0, t, eps: _duffing_closed(s0, t, eps, second=False)


# --- damped oscillator with quadratic nonlinearity -------------------------


def _dq_f1(s):
    a, b = s
    return np.array([-(a**2), 2 * a * b])


def _dq_f2(s):
    a, b = s
    return np.array([-2 * a**3, 2 * a**2 * b])


def _dq_residual(s, eps, y0, dy0):
    a, b = s.real
    y = a + b - 0.5 * eps * b**2
    dy = -eps * a**2 + 2 * eps * a * b - b + eps * b**2
    return np.array([y - y0, dy - dy0])


def damped_quadratic_model() -> AmplitudeModel:
    """``y'' + y' + eps y**2 = 0``: ``y = A + B e^{-t} - eps B**2 e^{-2t}/2``."""
    return AmplitudeModel(
        name="damped_quadratic",
        dim=2,
        complex_state=False,
        f1=_dq_f1,
        f2=_dq_f2,
        reconstruction=ReconstructionMap(
            (
                CarrierTerm(0.0, lambda s: s[0], self_conjugate=True),
                CarrierTerm(1j, lambda s: s[1], self_conjugate=True),
                CarrierTerm(2j, lambda s: -0.5 * s[1] ** 2, power=1, self_conjugate=True),
            )
        ),
        ic_residual=_dq_residual,
        seed=lambda y0, dy0: np.array([y0 + dy0, -dy0], dtype=complex),
        notes="the amplitude pair fails the cross-derivative test; the reconstruction is still valid",
    )


def _dq_first_closed(s0, t, eps):
    t = np.asarray(t, dtype=float)
    a0, b0 = s0
    g = 1.0 + eps * a0 * t
    return np.array([a0 / g, b0 * g**2])


_first_order_closed_form["damped_quadratic"] = _dq_first_closed


MODELS = {
    "damped_linear": damped_linear_model,
    "duffing": duffing_model,
    "damped_quadratic": damped_quadratic_model,
}


# --- solving ---------------------------------------------------------------


@dataclass
class AmplitudeTrajectory:
    model: AmplitudeModel
    eps: float
    state0: np.ndarray
    t_end: float
    _sol: Callable = field(repr=False)
    closed_form_error: float | None = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12) or np.any(t > self.t_end * (1 + 1e-12)):
            raise DomainError("evaluation time outside the solved window")
        return self._sol(t)


def _to_real(s, complex_state):
    return np.concatenate([s.real, s.imag]) if complex_state else s.real.astype(float)


def _from_real(x, complex_state, dim):
    return x[:dim] + 1j * x[dim:] if complex_state else x.astype(complex)


def amplitude_solve(model: AmplitudeModel, state0, eps: float, t_end: float) -> AmplitudeTrajectory:
    """Integrate the amplitude equation on ``[0, t_end]`` with ``t_end <= 10/eps**2``."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    if t_end > 10.0 / eps**2 * (1 + 1e-12):
        raise PreconditionError(f"t_end={t_end} beyond the validity window 10/eps**2={10 / eps**2}")
    s0 = np.asarray(state0, dtype=complex).reshape(model.dim)
    cs = model.complex_state
    d = model.dim

    def rhs(t, x):
        return _to_real(model.vector_field(_from_real(x, cs, d), eps), cs)

    def blowup(t, x):
        return BLOWUP - np.max(np.abs(x))

    blowup.terminal = True
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        _to_real(s0, cs),
        method="DOP853",
        rtol=AMPLITUDE_RTOL,
        atol=AMPLITUDE_ATOL,
        dense_output=True,
        events=blowup,
    )
    if sol.status == 1 or not np.all(np.isfinite(sol.y)):
        raise DivergenceFailure(f"{model.name}: amplitude exceeded {BLOWUP:g} at t={sol.t[-1]:.6g}")
    if sol.status != 0:
        raise DivergenceFailure(f"{model.name}: {sol.message}")

    def dense(t):
        x = sol.sol(t)
        return x[:d] + 1j * x[d:] if cs else x.astype(complex)

    traj = AmplitudeTrajectory(model, eps, s0, t_end, dense)
    if model.closed_form is not None:
        ts = np.linspace(0.0, t_end, 2001)
        exact = model.closed_form(s0, ts, eps)
        scale = max(1.0, float(np.max(np.abs(exact))))
        traj.closed_form_error = float(np.max(np.abs(dense(ts) - exact)) / scale)
    return traj


def fit_initial_conditions(model: AmplitudeModel, y0: float, dy0: float, eps: float, max_iter: int = 50, tol: float = 1e-12):
    """Newton solve of ``ic_residual = 0`` in real coordinates, seeded at eps = 0."""
    cs = model.complex_state
    d = model.dim
    x = _to_real(np.asarray(model.seed(y0, dy0), dtype=complex), cs)
    n = x.size

    def res(v):
        return np.asarray(model.ic_residual(_from_real(v, cs, d), eps, y0, dy0), dtype=float)

    if n != 2:
        raise ValueError("initial-condition fitting expects two real unknowns")
    r = res(x)
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            return _from_real(x, cs, d)
        jac = np.empty((2, n))
        for k in range(n):
            h = 1e-7 * max(1.0, abs(x[k]))
            e = np.zeros(n)
            e[k] = h
            jac[:, k] = (res(x + e) - res(x - e)) / (2 * h)
        try:
            dx = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise FitFailure(f"singular Jacobian in {model.name} fit") from exc
        x = x + dx
        r = res(x)
        if not np.all(np.isfinite(r)):
            break
    if np.all(np.isfinite(r)) and np.max(np.abs(r)) <= tol:
        return _from_real(x, cs, d)
    raise FitFailure(f"{model.name}: Newton did not converge in {max_iter} iterations (|r|={np.max(np.abs(r)):.3g})")


def reconstruct(model: AmplitudeModel, trajectory, t, eps: float):
    """``y(t)`` from an amplitude trajectory (callable) or a fixed state."""
    t = np.asarray(t, dtype=float)
    state = trajectory(t) if callable(trajectory) else np.asarray(trajectory, dtype=complex)
    return model.reconstruction(state, t, eps)


def reconstruction_imag(model: AmplitudeModel, trajectory, t, eps: float) -> float:
    """Largest imaginary part of the reconstruction before the real part is taken."""
    t = np.asarray(t, dtype=float)
    state = trajectory(t) if callable(trajectory) else np.asarray(trajectory, dtype=complex)
    return float(np.max(np.abs(model.reconstruction.complex_value(state, t, eps).imag)))


# --- compatibility ----------------------------------------------------------


@dataclass(frozen=True)
class CompatibilityReport:
    residual: float
    trace: tuple  # per-sample residual vectors (real coordinates)

    @property
    def compatible(self) -> bool:
        return self.residual <= 1e-6


def _jacobian(flow, x, complex_state, dim, h):
    n = x.size
    jac = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        fp = _to_real(np.asarray(flow(_from_real(x + e, complex_state, dim)), dtype=complex), complex_state)
        fm = _to_real(np.asarray(flow(_from_real(x - e, complex_state, dim)), dtype=complex), complex_state)
        jac[:, k] = (fp - fm) / (2 * h)
    return jac


def cross_derivative_check(flow1, flow2, samples: Sequence, h: float = 1e-6) -> CompatibilityReport:
    """Compare ``d/dt2 d/dt1 S`` with ``d/dt1 d/dt2 S`` at each sample state.

    With ``dS/dt1 = flow1(S)`` and ``dS/dt2 = flow2(S)`` the mixed derivatives
    are ``J_flow1 . flow2`` and ``J_flow2 . flow1``.  Complex states are
    handled in real coordinates, so non-holomorphic flows are fine.
    """
    if len(samples) == 0:
        raise ValueError("need at least one sample state")
    trace = []
    for s in samples:
        s = np.atleast_1d(np.asarray(s))
        cs = np.iscomplexobj(s)
        d = s.size
        x = _to_real(s.astype(complex), cs)
        f1 = _to_real(np.asarray(flow1(s.astype(complex)), dtype=complex), cs)
        f2 = _to_real(np.asarray(flow2(s.astype(complex)), dtype=complex), cs)
        r = _jacobian(flow1, x, cs, d, h) @ f2 - _jacobian(flow2, x, cs, d, h) @ f1
        trace.append(tuple(float(v) for v in r))
    residual = max(float(np.max(np.abs(r))) for r in trace)
    return CompatibilityReport(residual, tuple(trace))
