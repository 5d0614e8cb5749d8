"""Strang split-step Fourier integration of envelope equations."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .fields import EnvelopeField, Trajectory
from .models import EnvelopePDEModel, second_linear_symbol
from ..errors import DivergenceFailure, PreconditionError

MAX_ENVELOPE_DT = 0.5


def step_count(t_end: float, dt: float) -> tuple[int, float]:
    """Number of steps and the (possibly shortened) step landing exactly on t_end."""
    if dt <= 0 or t_end < 0:
        raise PreconditionError("dt must be positive and t_end nonnegative")
    n = max(1, math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    return n, (t_end / n if n else dt)


def _save_indices(n_steps: int, n_snapshots: int | None) -> set:
    if not n_snapshots or n_snapshots < 2:
        return {0, n_steps}
    return set(np.unique(np.round(np.linspace(0, n_steps, n_snapshots)).astype(int)).tolist())


def strang_integrate(
    a0: np.ndarray,
    symbol: np.ndarray,
    nonlinear: Callable,
    t_end: float,
    dt: float,
    n_snapshots: int | None = None,
):
    """``L(h/2) N(h) L(h/2)`` steps where ``L`` multiplies ``fft(A)`` by
    ``exp(symbol h/2)`` and ``nonlinear(A, h)`` advances the local part.

    Works for arrays of any dimension.  Returns (times, snapshots, h).
    """
    n, h = step_count(t_end, dt)
    half = np.exp(symbol * (0.5 * h))
    save = _save_indices(n, n_snapshots)
    a = np.array(a0, dtype=complex)
    times, snaps = [0.0], [a.copy()]
    for i in range(1, n + 1):
        a = np.fft.ifftn(half * np.fft.fftn(a))
        a = nonlinear(a, h)
        a = np.fft.ifftn(half * np.fft.fftn(a))
        if i in save:
            if not np.all(np.isfinite(a)):
                raise DivergenceFailure(f"non-finite envelope at t={i * h:.6g}")
            times.append(i * h)
            snaps.append(a.copy())
    if not np.all(np.isfinite(a)):
        raise DivergenceFailure("non-finite envelope")
    return np.array(times), snaps, h


def kerr_rotation(c0: float):
    """Exact solution of ``A_t = i c0 |A|**2 A`` over a step: a pointwise phase rotation."""

    def step(a, h):
        return a * np.exp(1j * c0 * h * np.abs(a) ** 2)

    return step


def nls_solve(model: EnvelopePDEModel, A0: EnvelopeField, eps: float | None = None, t_end: float = 1.0, dt: float = 0.1, n_snapshots: int | None = None) -> Trajectory:
    """Split-step solution of the single-envelope model from ``A0``."""
    if dt > MAX_ENVELOPE_DT:
        raise PreconditionError(f"dt={dt} exceeds the envelope step limit {MAX_ENVELOPE_DT}")
    if eps is not None and abs(eps - model.eps) > 1e-15:
        raise PreconditionError("eps does not match the model")
    if model.coupled:
        raise PreconditionError("use coupled_solve for phase-matched models")
    q = A0.grid.wavenumbers()
    times, snaps, h = strang_integrate(A0.values, model.linear_symbol(q), kerr_rotation(model.c0), t_end, dt, n_snapshots)
    states = [EnvelopeField(A0.grid, s, model.k, model.omega, t, check_band=False) for t, s in zip(times, snaps)]
    meta = {**model.meta(), "dt": h, "t_end": t_end, "grid": A0.grid.meta(), "steps": int(round(t_end / h)) if t_end else 0}
    return Trajectory(times, states, meta)


def _rk4_coupled(coupling):
    def step(ab, h):
        a, b = ab

        def f(x, y):
            return coupling(x, y)

        k1a, k1b = f(a, b)
        k2a, k2b = f(a + 0.5 * h * k1a, b + 0.5 * h * k1b)
        k3a, k3b = f(a + 0.5 * h * k2a, b + 0.5 * h * k2b)
        k4a, k4b = f(a + h * k3a, b + h * k3b)
        return np.stack(
            [
                a + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a),
                b + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b),
            ]
        )

    return step


def coupled_solve(model: EnvelopePDEModel, A0: EnvelopeField, B0: EnvelopeField, eps: float | None = None, t_end: float = 1.0, dt: float = 0.1, n_snapshots: int | None = None) -> Trajectory:
    """Split-step solution of the phase-matched pair; states are ``(A, B)`` tuples.

    The local step integrates the coupled cubic terms with one RK4 step,
    since they do not reduce to a phase rotation.
    """
    if not model.coupled:
        raise PreconditionError("model has no second envelope")
    if dt > MAX_ENVELOPE_DT:
        raise PreconditionError(f"dt={dt} exceeds the envelope step limit {MAX_ENVELOPE_DT}")
    if eps is not None and abs(eps - model.eps) > 1e-15:
        raise PreconditionError("eps does not match the model")
    if A0.grid != B0.grid:
        raise PreconditionError("A0 and B0 must share a grid")
    q = A0.grid.wavenumbers()
    symbol = np.stack([model.linear_symbol(q), second_linear_symbol(model, q)])
    # fftn over the stacked array would also transform the stacking axis; use per-row transforms.
    n, h = step_count(t_end, dt)
    half = np.exp(symbol * (0.5 * h))
    local = _rk4_coupled(model.coupling)
    save = _save_indices(n, n_snapshots)
    ab = np.stack([A0.values, B0.values]).astype(complex)
    times, snaps = [0.0], [ab.copy()]
    for i in range(1, n + 1):
        ab = np.fft.ifft(half * np.fft.fft(ab, axis=-1), axis=-1)
        ab = local(ab, h)
        ab = np.fft.ifft(half * np.fft.fft(ab, axis=-1), axis=-1)
        if i in save:
            if not np.all(np.isfinite(ab)):
                raise DivergenceFailure(f"non-finite envelopes at t={i * h:.6g}")
            times.append(i * h)
            snaps.append(ab.copy())
    states = [
        (
            EnvelopeField(A0.grid, s[0], model.k, model.omega, t, check_band=False),
            EnvelopeField(A0.grid, s[1], model.second_k, model.second_omega, t, check_band=False),
        )
        for t, s in zip(times, snaps)
    ]
    power = [power_proxy(model, a, b) for a, b in states]
    meta = {**model.meta(), "dt": h, "t_end": t_end, "grid": A0.grid.meta(), "power_proxy": power}
    return Trajectory(np.array(times), states, meta)


def power_proxy(model: EnvelopePDEModel, a: EnvelopeField, b: EnvelopeField) -> float:
    """``int (omega(k)|A|**2 + omega(3k)|B|**2 / 3) dx``."""
    dx = a.grid.dx
    return float(np.sum(model.omega * np.abs(a.values) ** 2 + model.second_omega * np.abs(b.values) ** 2 / 3) * dx)
