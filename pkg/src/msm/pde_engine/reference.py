"""Pseudo-spectral full-field solver used as the reference for envelope models."""

from __future__ import annotations

import numpy as np

from .dispersion import DispersionRelation, fourth_order, klein_gordon
from .fields import Trajectory, WaveField
from .splitstep import _save_indices, step_count
from ..errors import DivergenceFailure, PreconditionError

CFL_FACTOR = 0.2

FIELD_EQUATIONS = {
    # name: (dispersion factory, nonlinear power)
    "klein_gordon": (klein_gordon, 2),
    "fourth_order": (fourth_order, 3),
}


def max_stable_dt(dispersion: DispersionRelation, grid) -> float:
    return CFL_FACTOR / float(dispersion.omega(grid.k_nyquist))


def dealias_mask(grid) -> np.ndarray:
    q = np.abs(grid.rwavenumbers())
    return (q <= (2.0 / 3.0) * grid.k_nyquist).astype(float)


def linear_energy(field: WaveField, dispersion: DispersionRelation) -> float:
    """``sum |v_hat|**2 + omega(q)**2 |u_hat|**2``, conserved by the linear equation."""
    uh = np.fft.fft(field.u)
    vh = np.fft.fft(field.v)
    q = field.grid.wavenumbers()
    return float(np.sum(np.abs(vh) ** 2 + dispersion.symbol(q) * np.abs(uh) ** 2) / field.grid.n)


def spectral_reference_solve(
    model,
    initial: WaveField,
    eps: float,
    t_end: float,
    dt: float,
    n_snapshots: int | None = None,
) -> Trajectory:
    """RK4 in time on ``(u, v)`` with spectral derivatives.

    ``model`` is a field-equation name (``"klein_gordon"``, ``"fourth_order"``)
    or any object with a ``field_equation`` attribute.  The nonlinearity
    ``eps u**p`` is formed pointwise and its spectrum truncated by the 2/3 rule.
    """
    name = getattr(model, "field_equation", model)
    if name not in FIELD_EQUATIONS:
        raise ValueError(f"unknown field equation {name!r}")
    factory, power = FIELD_EQUATIONS[name]
    disp = factory()
    grid = initial.grid
    limit = max_stable_dt(disp, grid)
    if dt > limit * (1 + 1e-12):
        raise PreconditionError(f"dt={dt} exceeds the stability limit {limit:.4g}")
    n = grid.n
    sym = disp.symbol(grid.rwavenumbers())
    mask = dealias_mask(grid)

    def rhs(u, v):
        lin = np.fft.irfft(-sym * np.fft.rfft(u), n)
        if eps:
            lin = lin + eps * np.fft.irfft(mask * np.fft.rfft(u**power), n)
        return v, lin

    steps, h = step_count(t_end, dt)
    save = _save_indices(steps, n_snapshots)
    u = initial.u.copy()
    v = initial.v.copy()
    times, states = [0.0], [WaveField(grid, u.copy(), v.copy(), 0.0)]
    for i in range(1, steps + 1):
        k1u, k1v = rhs(u, v)
        k2u, k2v = rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v)
        k3u, k3v = rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v)
        k4u, k4v = rhs(u + h * k3u, v + h * k3v)
        u = u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if i in save or i % 256 == 0:
            if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
                raise DivergenceFailure(f"non-finite field at t={i * h:.6g}")
        if i in save:
            times.append(i * h)
            states.append(WaveField(grid, u.copy(), v.copy(), i * h))
    meta = {"field_equation": name, "eps": eps, "dt": h, "t_end": t_end, "grid": grid.meta(), "steps": steps}
    return Trajectory(np.array(times), states, meta)
