"""Step-size benchmark: coarsest accurate step of direct versus envelope solvers."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..errors import BenchFailure, DivergenceFailure, PreconditionError, StiffnessFailure
from ..ode_engine import amplitude_solve, duffing_model, duffing_problem, fit_initial_conditions, rk_reference_solve
from ..pde_engine import (
    EnvelopeField,
    Grid1D,
    envelope_error,
    gaussian_envelope,
    klein_gordon_model,
    max_stable_dt,
    nls_solve,
    reconstruct_field,
    spectral_reference_solve,
)


@dataclass
class StepSearch:
    solver: str
    dt: float
    steps: int
    error: float
    evaluations: int
    wall_time: float  # of one run at the selected step
    capped: bool  # the upper search bound itself was accurate


def coarsest_step(run, h_min: float, h_max: float, target: float, rel_tol: float = 0.02, max_iter: int = 60):
    """Largest step in ``[h_min, h_max]`` whose error (``run(h)``) is at most ``target``.

    Bisection in log(h); non-finite errors and solver failures count as
    inaccurate.  Assumes the error grows with the step.
    """

    def err(h):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                e = float(run(h))
        except (PreconditionError, DivergenceFailure, StiffnessFailure, ArithmeticError):
            return math.inf
        return e if math.isfinite(e) else math.inf

    evals = 1
    e_hi = err(h_max)
    if e_hi <= target:
        return h_max, e_hi, evals, True
    e_lo = err(h_min)
    evals += 1
    if e_lo > target:
        raise BenchFailure(f"error {e_lo:.3g} above target {target:g} even at the finest step {h_min:g}")
    lo, hi = h_min, h_max
    for _ in range(max_iter):
        if hi / lo <= 1 + rel_tol:
            break
        mid = math.sqrt(lo * hi)
        e = err(mid)
        evals += 1
        if e <= target:
            lo, e_lo = mid, e
        else:
            hi = mid
    return lo, e_lo, evals, False


def _rk4_fixed(f, y0, t_end: float, h: float):
    n = max(1, math.ceil(t_end / h - 1e-9))
    h = t_end / n
    ys = np.empty((n + 1,) + np.shape(y0), dtype=np.result_type(y0, float))
    ys[0] = y0
    y = np.asarray(y0)
    for i in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = y
    return np.linspace(0.0, t_end, n + 1), ys, n


def _hermite_eval(tn, yn, dyn, t):
    i = np.clip(np.searchsorted(tn, t, side="right") - 1, 0, len(tn) - 2)
    h = tn[i + 1] - tn[i]
    s = (t - tn[i]) / h
    return (
        (1 + 2 * s) * (1 - s) ** 2 * yn[i]
        + s * (1 - s) ** 2 * h * dyn[i]
        + s**2 * (3 - 2 * s) * yn[i + 1]
        + s**2 * (s - 1) * h * dyn[i + 1]
    )


def bench_duffing(eps: float = 0.1, t_end: float = 100.0, target: float = 0.05, y0: float = 1.0):
    """Fixed-step RK4 on the oscillator versus fixed-step RK4 on its amplitude equation.

    Each solver's error is the max deviation of ``y`` from its own converged
    solution: the tight-tolerance direct solution for the oscillator, and the
    reconstruction from the tight amplitude solution for the envelope.  The
    direct error is sampled at its own nodes, the envelope error on a 0.05
    grid using Hermite interpolation of the amplitude.
    """
    model = duffing_model()
    ref = rk_reference_solve(duffing_problem(eps, t_end, y0, 0.0), 1e-12)
    a0 = fit_initial_conditions(model, y0, 0.0, eps)
    amp = amplitude_solve(model, a0, eps, t_end)
    t_fine = np.linspace(0.0, t_end, int(round(t_end / 0.05)) + 1)
    y_ms_conv = model.reconstruction(amp(t_fine), t_fine, eps)
    model_error = float(np.max(np.abs(y_ms_conv - ref(t_fine))))

    def direct(h):
        tn, yn, _ = _rk4_fixed(lambda z: np.array([z[1], -z[0] + eps * z[0] ** 3]), np.array([y0, 0.0]), t_end, h)
        return np.max(np.abs(yn[:, 0] - ref(tn)))

    def envelope(h):
        f = lambda s: model.vector_field(s, eps)  # noqa: E731
        tn, sn, _ = _rk4_fixed(f, a0, t_end, h)
        dsn = np.array([f(s) for s in sn])
        s_fine = _hermite_eval(tn, sn[:, 0], dsn[:, 0], t_fine)
        return np.max(np.abs(model.reconstruction(s_fine[None, :], t_fine, eps) - y_ms_conv))

    out = {}
    for name, run, h_min, h_max in (("direct", direct, 1e-3, 2.0), ("envelope", envelope, 1e-2, t_end / 2)):
        h, e, evals, capped = coarsest_step(run, h_min, h_max, target)
        t0 = time.perf_counter()
        run(h)
        wall = time.perf_counter() - t0
        out[name] = StepSearch(name, h, math.ceil(t_end / h - 1e-9), e, evals, wall, capped)
    return out, {"model_error": model_error, "eps": eps, "t_end": t_end, "target": target}


def kg_setup(eps: float, k: float = 1.0, n: int = 4096, periods: int = 64, amplitude: float = 1.0, width: float = 20.0):
    grid = Grid1D(n, 2 * np.pi * periods / k)
    model = klein_gordon_model(k, eps)
    A0 = EnvelopeField(grid, gaussian_envelope(grid, amplitude, width / k), k, model.omega)
    return grid, model, A0


def bench_kg(eps: float = 0.1, target: float = 0.05, t_end: float | None = None, **setup):
    """Pseudo-spectral RK4 on the full field versus split-step on the envelope.

    Errors are relative L2 field differences against each solver's converged
    run (half the stability-limited step for the direct solver, 1/64 of the
    envelope step limit for the envelope solver).  The direct step may not
    exceed its stability precondition.
    """
    t_end = 10.0 / eps if t_end is None else t_end
    grid, model, A0 = kg_setup(eps, **setup)
    init = reconstruct_field(model, A0, eps, 0.0)
    dt_cap = max_stable_dt(model.dispersion, grid)

    cache = {}

    def direct_run(h):
        key = round(h, 15)
        if key not in cache:
            cache[key] = spectral_reference_solve(model, init, eps, t_end, h).final
        return cache[key]

    direct_conv = direct_run(dt_cap / 2)
    env_conv = reconstruct_field(model, nls_solve(model, A0, eps, t_end, 0.5 / 64).final, eps, t_end)
    ref_model_error = envelope_error(direct_conv, env_conv)[0]

    def direct(h):
        return envelope_error(direct_conv, direct_run(h))[0]

    def envelope(h):
        fin = nls_solve(model, A0, eps, t_end, h).final
        return envelope_error(env_conv, reconstruct_field(model, fin, eps, t_end))[0]

    out = {}
    for name, run, h_min, h_max in (("direct", direct, dt_cap / 64, dt_cap), ("envelope", envelope, 1e-3, 0.5)):
        h, e, evals, capped = coarsest_step(run, h_min, h_max, target)
        t0 = time.perf_counter()
        if name == "direct":
            spectral_reference_solve(model, init, eps, t_end, h)
        else:
            nls_solve(model, A0, eps, t_end, h)
        wall = time.perf_counter() - t0
        out[name] = StepSearch(name, h, math.ceil(t_end / h - 1e-9), e, evals, wall, capped)
    info = {
        "model_error": ref_model_error,
        "eps": eps,
        "t_end": t_end,
        "target": target,
        "direct_dt_cap": dt_cap,
        "rk4_stability_dt": 2 * math.sqrt(2) / float(model.dispersion.omega(grid.k_nyquist)),
        "grid": grid.meta(),
    }
    return out, info
