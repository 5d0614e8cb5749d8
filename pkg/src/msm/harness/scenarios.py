"""Built-in scenarios reproducing the worked examples."""

from __future__ import annotations

import math
import time
from fractions import Fraction

import mpmath
import numpy as np

from .. import algebraic as alg
from .. import maxwell as mx
from ..ode_engine import (
    amplitude_solve,
    cross_derivative_check,
    damped_linear_model,
    damped_linear_problem,
    damped_quadratic_model,
    duffing_model,
    duffing_problem,
    fit_initial_conditions,
    reconstruct,
    reconstruction_imag,
    regular_expansion_damped,
    rk_reference_solve,
)
from ..pde_engine import (
    EnvelopeField,
    Grid1D,
    coupled_fourth_order_model,
    coupled_solve,
    envelope_error,
    fourth_order,
    fourth_order_model,
    gaussian_envelope,
    klein_gordon,
    max_stable_dt,
    nls_solve,
    phase_matching_scan,
    reconstruct_field,
    spectral_reference_solve,
    write_metadata_json,
    write_snapshot_csv,
)
from ..series_core import euler_f, euler_remainder_bound, euler_series
from .bench import bench_duffing, bench_kg, kg_setup
from .config import ExperimentConfig
from .report import Record, write_csv

# Printed table values (rounded as printed).
QUADRATIC_TABLE = {0.001: (0.998999, 0.998999), 0.01: (0.989898, 0.989900), 0.1: (0.887298, 0.890000)}
# The eps=0.01 entry is printed as 1.19795 for both columns; the series itself gives 1.18795.
QUINTIC_TABLE = {0.001: (1.18908, 1.18908), 0.01: (1.18795, 1.18795), 0.1: (1.17636, 1.17638)}
SINGULAR_TABLE = {0.1: (-10.916, -10.900)}
DAMPED_TABLE = {4.0: (-0.6444, -0.6367), 40.0: (-0.5426, -0.5372), 400.0: (-0.0722, 0.5295)}


def _digits_match(value: float, printed: float, digits: int) -> bool:
    return round(value, digits) == round(printed, digits)


# --- roots-table -----------------------------------------------------------


def roots_table(cfg: ExperimentConfig, out) -> list:
    records = []
    quad = alg.quadratic_regular()
    quint = alg.quintic()
    sing = alg.quadratic_singular()
    q_exp = alg.expand_root(quad, 1, 2)
    q_a0 = max(alg.solve_unperturbed(quint))
    qi_exp = alg.expand_root(quint, q_a0, 2)
    resc = alg.rescale_with_power(sing, 1)
    y_exp = alg.expand_root(resc.polynomial, -1, 2)
    rows = []
    # Coefficient-level checks, independent of eps.
    if cfg.eps_values(sorted(QUADRATIC_TABLE)):
        t0 = time.perf_counter()
        rec = Record("roots-table", None)
        q4 = alg.expand_root(quad, 1, 4)
        rec.check("quadratic_order4_coeffs_exact", float(list(q4.coeffs.coeffs) == [1, -1, -1, -2, -5]), 1.0, kind="ge")
        rec.check("quadratic_order4_series_eps0.1", float(q4(Fraction(1, 10))), 1e-4, target=0.8875)
        rec.check("quadratic_order4_exact_eps0.1", alg.exact_root_oracle(quad, 0.1, 0.8875), 1e-4, target=0.8872)
        a1, a2 = qi_exp.coeffs.coeff(1), qi_exp.coeffs.coeff(2)
        rec.check("quintic_a1_exact", float(a1 == Fraction(-1, 8)), 1.0, kind="ge")
        rec.check("quintic_a2", float(a2), 1e-12, target=-5 * 8**0.25 / 256)
        rec.check("singular_rescaled_coeffs_exact", float(list(y_exp.coeffs.coeffs) == [-1, -1, 1]), 1.0, kind="ge")
        rec.outputs = {
            "quadratic_coeffs": [str(c) for c in q4.coeffs.coeffs],
            "quintic_coeffs": [str(c) for c in qi_exp.coeffs.coeffs],
            "singular_rescaled_coeffs": [str(c) for c in y_exp.coeffs.coeffs],
        }
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    for eps in cfg.eps_values(sorted(QUADRATIC_TABLE)):
        t0 = time.perf_counter()
        rec = Record("roots-table", eps)
        e = Fraction(str(eps))
        qs = float(q_exp(e))
        qx = alg.exact_root_oracle(quad, eps, qs)
        qis = float(qi_exp(eps))
        qix = alg.exact_root_oracle(quint, eps, qis)
        ys = float(alg.singular_composite(y_exp, 1, eps))
        yx = alg.exact_root_oracle(sing, eps, ys)
        rows += [
            ("quadratic", eps, qx, qs),
            ("quintic", eps, qix, qis),
            ("singular", eps, yx, ys),
        ]
        rec.outputs = {"quadratic": (qx, qs), "quintic": (qix, qis), "singular": (yx, ys)}
        if eps in QUADRATIC_TABLE:
            px, ps = QUADRATIC_TABLE[eps]
            rec.check("quadratic_series_printed_digits", float(_digits_match(qs, ps, 6)), 1.0, kind="ge")
            rec.check("quadratic_exact", qx, 1e-6, target=px)
        if eps in QUINTIC_TABLE:
            px, ps = QUINTIC_TABLE[eps]
            rec.check("quintic_exact", qix, 5e-5, target=px)
            rec.check("quintic_series", qis, 5e-5, target=ps)
        if eps in SINGULAR_TABLE:
            px, ps = SINGULAR_TABLE[eps]
            rec.check("singular_exact", yx, 1e-3, target=px)
            rec.check("singular_composite", ys, 1e-3, target=ps)
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    if records:
        path = write_csv(out / "roots_table.csv", ["problem", "eps", "exact", "series"], rows)
        records[0].artifacts.append(path.name)
    return records


# --- euler-figure ----------------------------------------------------------


def euler_figure(cfg: ExperimentConfig, out) -> list:
    records = []
    m_max = int(cfg.param("m_max", 15))
    series = euler_series(m_max)
    rows = []
    for eps in cfg.eps_values((0.2, 0.1, 0.05, 0.01)):
        t0 = time.perf_counter()
        rec = Record("euler-figure", eps, inputs={"m_max": m_max})
        e = Fraction(str(eps))
        with mpmath.workdps(50):
            f = euler_f(e, dps=40)
            errs = []
            worst = -math.inf
            for m in range(m_max + 1):
                s_m = series.partial_sum(e, m)
                err = abs(f - mpmath.mpf(s_m.numerator) / s_m.denominator)
                bound = euler_remainder_bound(e, m)
                ratio = float(err / (mpmath.mpf(bound.numerator) / bound.denominator))
                worst = max(worst, ratio)
                errs.append(float(err))
                rows.append((eps, m, float(err), float(bound)))
        rec.check("max_error_over_bound", worst, 1.0)
        m_best = int(np.argmin(errs))
        rec.outputs = {"errors": errs, "argmin_m": m_best}
        if abs(eps - 0.1) < 1e-15:
            dec = all(errs[i + 1] < errs[i] for i in range(m_best))
            inc = m_best < m_max and errs[-1] > errs[m_best]
            rec.check("divergence_signature", float(dec and inc), 1.0, kind="ge")
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    if records:
        path = write_csv(out / "euler_errors.csv", ["eps", "m", "abs_error", "bound"], rows)
        records[0].artifacts.append(path.name)
    return records


# --- damped-table ----------------------------------------------------------


def damped_table(cfg: ExperimentConfig, out) -> list:
    records = []
    tol = cfg.tol or 1e-12
    model = damped_linear_model()
    for eps in cfg.eps_values((0.01,)):
        t0 = time.perf_counter()
        rec = Record("damped-table", eps, inputs={"tol": tol})
        ref = rk_reference_solve(damped_linear_problem(eps, 400.0), tol)
        s0 = fit_initial_conditions(model, 1.0, 0.0, eps)
        amp = amplitude_solve(model, s0, eps, 400.0)
        ts = np.array(sorted(DAMPED_TABLE))
        y_ref = ref(ts)
        y_reg = regular_expansion_damped(ts, eps)
        y_ms = reconstruct(model, amp, ts, eps)
        rows = list(zip(ts, y_ref, y_reg, y_ms))
        if abs(eps - 0.01) < 1e-15:
            for t, yr, yg in zip(ts, y_ref, y_reg):
                pe, pr = DAMPED_TABLE[t]
                rec.check(f"reference_t{t:g}", yr, 5e-4, target=pe)
                rec.check(f"regular_t{t:g}", yg, 5e-4, target=pr)
        grid = np.linspace(0.0, 400.0, 40001)
        y_grid_ref = ref(grid)
        ms_err = float(np.max(np.abs(reconstruct(model, amp, grid, eps) - y_grid_ref)))
        rec.check("multiscale_uniform_error", ms_err, 0.01)
        rec.check("regular_error_t4", abs(y_reg[0] - y_ref[0]), 0.01)
        rec.check("regular_error_t400", abs(y_reg[-1] - y_ref[-1]), 0.5, kind="gt")
        rec.check("amplitude_closed_form", amp.closed_form_error, 1e-9)
        rec.steps = {"reference": ref.n_steps}
        curve = np.linspace(0.0, 400.0, 4001)
        path1 = write_csv(out / f"damped_table_eps{eps:g}.csv", ["t", "y_reference", "y_regular", "y_multiscale"], rows)
        path2 = write_csv(
            out / f"damped_curve_eps{eps:g}.csv",
            ["t", "y_reference", "y_regular", "y_multiscale"],
            zip(curve, ref(curve), regular_expansion_damped(curve, eps), reconstruct(model, amp, curve, eps)),
        )
        rec.artifacts += [path1.name, path2.name]
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    return records


# --- duffing-figures -------------------------------------------------------


def duffing_errors(eps: float, tol: float = 1e-12, y0: float = 1.0):
    """Reference and both amplitude models up to ``10/eps**2``; returns a dict of arrays and errors."""
    t_end = 10.0 / eps**2
    model = duffing_model()
    first = model.first_order()
    ref = rk_reference_solve(duffing_problem(eps, t_end, y0, 0.0), tol)
    s0 = fit_initial_conditions(model, y0, 0.0, eps)
    amp2 = amplitude_solve(model, s0, eps, t_end)
    amp1 = amplitude_solve(first, s0, eps, t_end)
    t_short = np.linspace(0.0, 1.0 / eps**2, int(round(20 / eps**2)) + 1)
    t_late = np.linspace(t_end - 2 * np.pi, t_end, 401)
    r_short = ref(t_short)
    r_late = ref(t_late)
    out = {
        "t_end": t_end,
        "state0": s0,
        "ic_residual": float(np.max(np.abs(model.ic_residual(s0, eps, y0, 0.0)))),
        "err2_short": float(np.max(np.abs(reconstruct(model, amp2, t_short, eps) - r_short))),
        "err1_short": float(np.max(np.abs(reconstruct(first, amp1, t_short, eps) - r_short))),
        "err2_late": float(np.max(np.abs(reconstruct(model, amp2, t_late, eps) - r_late))),
        "err1_late": float(np.max(np.abs(reconstruct(first, amp1, t_late, eps) - r_late))),
        "modulus_drift": float(np.max(np.abs(np.abs(amp2(np.linspace(0, t_end, 2001))[0]) - abs(s0[0])))),
        "closed_form_error": amp2.closed_form_error,
        "imag": reconstruction_imag(model, amp2, np.linspace(0, t_end, 2001), eps),
        "ref": ref,
        "amp2": amp2,
        "amp1": amp1,
        "model": model,
        "first": first,
    }
    return out


def duffing_figures(cfg: ExperimentConfig, out) -> list:
    records = []
    tol = cfg.tol or 1e-12
    rng = np.random.default_rng(cfg.seed)
    for eps in cfg.eps_values((0.1,)):
        t0 = time.perf_counter()
        rec = Record("duffing-figures", eps, inputs={"tol": tol, "y0": 1.0, "dy0": 0.0})
        d = duffing_errors(eps, tol)
        rec.check("ic_fit_residual", d["ic_residual"], 1e-12)
        rec.check("second_order_error_to_eps^-2", d["err2_short"], 0.1)
        rec.check("first_minus_second_error_at_t_end", d["err1_late"] - d["err2_late"], 0.0, kind="gt")
        rec.check("modulus_conservation", d["modulus_drift"], 1e-10)
        rec.check("amplitude_closed_form", d["closed_form_error"], 1e-9)
        rec.check("reconstruction_reality", d["imag"], 1e-14)
        rec.outputs = {k: d[k] for k in ("err2_short", "err1_short", "err2_late", "err1_late", "t_end")}
        rec.outputs["A0"] = complex(d["state0"][0])

        m = d["model"]
        samples = [np.array([r * np.exp(1j * p)]) for r, p in zip(rng.uniform(0, 1, 16), rng.uniform(0, 2 * np.pi, 16))]
        rep = cross_derivative_check(m.f1, m.f2, samples)
        rec.check("duffing_cross_derivative", rep.residual, 1e-6)
        dq = damped_quadratic_model()
        rep2 = cross_derivative_check(dq.f1, dq.f2, [np.array([1.0, 1.0])])
        rec.check("damped_quadratic_cross_derivative", abs(rep2.trace[0][0]), 1e-4, target=2.0)

        ts = np.arange(0.0, d["t_end"] + 1e-9, 0.5)
        path = write_csv(
            out / f"duffing_eps{eps:g}.csv",
            ["t", "y_reference", "y_second_order", "y_first_order"],
            zip(ts, d["ref"](ts), reconstruct(m, d["amp2"], ts, eps), reconstruct(d["first"], d["amp1"], ts, eps)),
        )
        rec.artifacts.append(path.name)
        rec.steps = {"reference": d["ref"].n_steps}
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    return records


# --- kg-packet -------------------------------------------------------------


def kg_packet_run(eps: float, n: int = 4096, periods: int = 64, k: float = 1.0, amplitude: float = 1.0, width: float = 20.0, env_dt: float = 0.1, t_end: float | None = None):
    t_end = 10.0 / eps if t_end is None else t_end
    grid, model, A0 = kg_setup(eps, k=k, n=n, periods=periods, amplitude=amplitude, width=width)
    env = nls_solve(model, A0, eps, t_end, env_dt)
    init = reconstruct_field(model, A0, eps, 0.0)
    dt = max_stable_dt(model.dispersion, grid)
    ref = spectral_reference_solve(model, init, eps, t_end, dt)
    u_ms = reconstruct_field(model, env.final, eps, t_end)
    rel, linf = envelope_error(ref.final, u_ms)
    mass_drift = abs(env.final.mass() - A0.mass()) / A0.mass()
    return {
        "rel_l2": rel,
        "linf": linf,
        "mass_drift": mass_drift,
        "env": env,
        "ref": ref,
        "u_ms": u_ms,
        "model": model,
        "A0": A0,
        "t_end": t_end,
    }


def kg_packet(cfg: ExperimentConfig, out) -> list:
    records = []
    for eps in cfg.eps_values((0.1,)):
        t0 = time.perf_counter()
        p = {
            "n": int(cfg.param("n", 4096)),
            "periods": int(cfg.param("periods", 64)),
            "k": float(cfg.param("k", 1.0)),
            "amplitude": float(cfg.param("amplitude", 1.0)),
            "width": float(cfg.param("width", 20.0)),
            "env_dt": float(cfg.param("env_dt", 0.1)),
        }
        rec = Record("kg-packet", eps, inputs=p)
        r = kg_packet_run(eps, **p)
        rec.check("relative_l2_error", r["rel_l2"], 0.05)
        rec.check("envelope_mass_drift", r["mass_drift"], 1e-10)
        rec.outputs = {"rel_l2": r["rel_l2"], "linf": r["linf"]}
        rec.steps = {"reference": r["ref"].meta["steps"], "envelope": r["env"].meta["steps"]}
        csv_path = write_snapshot_csv(out / f"kg_packet_eps{eps:g}.csv", r["env"].final, r["ref"].final, r["u_ms"])
        meta = {"envelope": r["env"].meta, "reference": r["ref"].meta}
        json_path = write_metadata_json(out / f"kg_packet_eps{eps:g}.json", meta)
        rec.artifacts += [csv_path.name, json_path.name]
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    return records


# --- fourth-order-packet ---------------------------------------------------


def fourth_order_run(eps: float, k: float = 1.0, n: int = 1024, periods: int = 32, amplitude: float = 0.5, width: float = 20.0, env_dt: float = 0.05, t_end: float | None = None):
    t_end = 1.0 / eps if t_end is None else t_end
    grid = Grid1D(n, 2 * np.pi * periods / k)
    model = fourth_order_model(k, eps)
    A0 = EnvelopeField(grid, gaussian_envelope(grid, amplitude, width / k), k, model.omega)
    env = nls_solve(model, A0, eps, t_end, env_dt)
    init = reconstruct_field(model, A0, eps, 0.0)
    ref = spectral_reference_solve(model, init, eps, t_end, max_stable_dt(model.dispersion, grid))
    u_ms = reconstruct_field(model, env.final, eps, t_end)
    rel, linf = envelope_error(ref.final, u_ms)
    mass_drift = abs(env.final.mass() - A0.mass()) / A0.mass()
    return {"rel_l2": rel, "linf": linf, "mass_drift": mass_drift, "env": env, "ref": ref, "u_ms": u_ms, "t_end": t_end}


def fourth_order_packet(cfg: ExperimentConfig, out) -> list:
    records = []
    for eps in cfg.eps_values((0.1,)):
        t0 = time.perf_counter()
        p = {
            "k": float(cfg.param("k", 1.0)),
            "n": int(cfg.param("n", 1024)),
            "periods": int(cfg.param("periods", 32)),
            "amplitude": float(cfg.param("amplitude", 0.5)),
            "width": float(cfg.param("width", 20.0)),
            "env_dt": float(cfg.param("env_dt", 0.05)),
        }
        rec = Record("fourth-order-packet", eps, inputs=p)
        r = fourth_order_run(eps, **p)
        # Leading-order reconstruction: the field error is O(eps) relative.
        rec.check("relative_l2_error", r["rel_l2"], eps)
        rec.check("envelope_mass_drift", r["mass_drift"], 1e-10)
        rec.outputs = {"rel_l2": r["rel_l2"], "linf": r["linf"]}
        rec.steps = {"reference": r["ref"].meta["steps"], "envelope": r["env"].meta["steps"]}
        csv_path = write_snapshot_csv(out / f"fourth_order_eps{eps:g}.csv", r["env"].final, r["ref"].final, r["u_ms"])
        json_path = write_metadata_json(out / f"fourth_order_eps{eps:g}.json", {"envelope": r["env"].meta, "reference": r["ref"].meta})
        rec.artifacts += [csv_path.name, json_path.name]
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    return records


# --- phase-matched-pair ----------------------------------------------------


def phase_matched_pair(cfg: ExperimentConfig, out) -> list:
    records = []
    roots = phase_matching_scan(fourth_order(), 3, (0.1, 2.0))
    kg_roots = phase_matching_scan(klein_gordon(), 2, (0.1, 10.0))
    for eps in cfg.eps_values((0.1,)):
        t0 = time.perf_counter()
        rec = Record("phase-matched-pair", eps)
        rec.check("fourth_order_root_count", len(roots), 0, target=1)
        k = roots[0] if roots else 1 / math.sqrt(3)
        rec.check("fourth_order_root", k, 1e-10, target=1 / math.sqrt(3))
        rec.check("klein_gordon_second_harmonic_roots", len(kg_roots), 0, target=0)
        model = coupled_fourth_order_model(k, eps)
        n = int(cfg.param("n", 256))
        grid = Grid1D(n, 2 * np.pi * int(cfg.param("periods", 64)) / k)
        amp = float(cfg.param("amplitude", 1.0))
        A0 = EnvelopeField(grid, gaussian_envelope(grid, amp, float(cfg.param("width", 40.0))), k, model.omega)
        B0 = EnvelopeField(grid, np.zeros(n), 3 * k, model.second_omega)
        # Initial growth of B from zero against the rate of its forcing term.
        h = 1e-3
        short = coupled_solve(model, A0, B0, eps, 10 * h, h)
        centre = int(np.argmax(np.abs(A0.values)))
        rate = abs(short.final[1].values[centre]) / (10 * h)
        expected = eps * abs(A0.values[centre]) ** 3 / (2 * model.second_omega)
        rec.check("b_initial_growth_rate", rate / expected, 1e-3, target=1.0)
        t_end = float(cfg.param("t_end", 1.0 / eps))
        run = coupled_solve(model, A0, B0, eps, t_end, float(cfg.param("env_dt", 0.05)), n_snapshots=11)
        power = run.meta["power_proxy"]
        rec.outputs = {
            "k": k,
            "b_max_final": float(np.max(np.abs(run.final[1].values))),
            "power_proxy_drift": abs(power[-1] - power[0]) / power[0],
        }
        rows = [(t, float(np.max(np.abs(a.values))), float(np.max(np.abs(b.values))), pw) for t, (a, b), pw in zip(run.times, run.states, power)]
        path = write_csv(out / f"phase_matched_eps{eps:g}.csv", ["t", "max_abs_A", "max_abs_B", "power_proxy"], rows)
        rec.artifacts.append(path.name)
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    return records


# --- maxwell-te ------------------------------------------------------------


def maxwell_te_run(eps: float, k: float = 1.0, eta: float = 1.0, n: int = 1024, periods: int = 32, amplitude: float = 0.5, width: float = 20.0, env_dt: float = 0.05, t_end: float | None = None):
    t_end = 1.0 / eps if t_end is None else t_end
    disp = mx.OpticalDispersion(mx.lorentz())
    coeffs = mx.te_coefficients(disp, k, eta)
    grid = Grid1D(n, 2 * np.pi * periods / k)
    A0 = EnvelopeField(grid, gaussian_envelope(grid, amplitude, width / k), k, coeffs.omega)
    scaling = mx.check_scaling(A0, coeffs, eps)
    env = mx.te_amplitude_solve(coeffs, A0, eps, t_end, env_dt)
    dt = 0.2 / max(disp.c * grid.k_nyquist, disp.susceptibility.params["omega0"])
    ref = mx.ade_reference_solve(disp, A0, eta, eps, t_end, dt)
    e_ms = mx.te_field(coeffs, env.final, t_end)
    e_ref = ref.final.E
    rel = float(np.linalg.norm(e_ms - e_ref) / np.linalg.norm(e_ref))
    mass_drift = abs(env.final.mass() - A0.mass()) / A0.mass()
    return {"rel_l2": rel, "mass_drift": mass_drift, "scaling": scaling, "coeffs": coeffs, "env": env, "ref": ref, "e_ms": e_ms, "t_end": t_end}


def maxwell_te(cfg: ExperimentConfig, out) -> list:
    records = []
    rng = np.random.default_rng(cfg.seed)
    for eps in cfg.eps_values((0.1,)):
        t0 = time.perf_counter()
        rec = Record("maxwell-te", eps)
        vac = mx.OpticalDispersion(mx.vacuum())
        worst = 0.0
        for kv in (0.5, 1.0, 2.0, 3.7):
            tc = mx.te_coefficients(vac, kv, 1.0)
            vc = mx.vector_coefficients(vac, kv, 1.0)
            half = 1 / (2 * kv)
            devs = [tc.alpha - half, tc.beta - half, vc.delta1 - half, vc.delta2 - half, tc.gamma - 1.5 * kv, tc.v_g - 1.0]
            worst = max(worst, max(abs(v) for v in devs))
        rec.check("vacuum_coefficient_identities", worst, 1e-14)
        lor = mx.OpticalDispersion(mx.lorentz())
        ks = rng.uniform(0.05, 8.0, 100)
        resid = 0.0
        for kv in ks:
            w, dw = mx.solve_dispersion(lor, kv)
            resid = max(resid, abs(lor.identity_residual(kv, w, dw)) / (2 * kv), abs(lor.residual(kv, w)) / kv**2)
        rec.check("dispersion_identity_residual", resid, 1e-10)
        frame = mx.PolarizationFrame.default()
        rec.check("frame_identity", float(np.max(np.abs(frame.projector_sum() - np.eye(3)))), 1e-14)
        p = {
            "k": float(cfg.param("k", 1.0)),
            "eta": float(cfg.param("eta", 1.0)),
            "n": int(cfg.param("n", 1024)),
            "periods": int(cfg.param("periods", 32)),
            "amplitude": float(cfg.param("amplitude", 0.5)),
            "width": float(cfg.param("width", 20.0)),
            "env_dt": float(cfg.param("env_dt", 0.05)),
        }
        rec.inputs = p
        r = maxwell_te_run(eps, **p)
        rec.check("lorentz_te_relative_l2", r["rel_l2"], 0.05)
        rec.check("envelope_mass_drift", r["mass_drift"], 1e-10)
        rec.outputs = {"rel_l2": r["rel_l2"], "scaling": r["scaling"], "coeffs": vars(r["coeffs"])}
        rec.steps = {"reference": r["ref"].meta["steps"], "envelope": int(round(r["t_end"] / r["env"].meta["dt"]))}
        g = r["env"].final.grid
        a = r["env"].final.values
        rows = zip(g.x, a.real, a.imag, r["ref"].final.E, r["e_ms"])
        path = write_csv(out / f"maxwell_te_eps{eps:g}.csv", ["x", "re_A", "im_A", "E_ref", "E_ms"], rows)
        jpath = write_metadata_json(out / f"maxwell_te_eps{eps:g}.json", {"envelope": r["env"].meta, "reference": r["ref"].meta})
        rec.artifacts += [path.name, jpath.name]
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)
    return records


# --- bench-speedup ---------------------------------------------------------


def bench_speedup(cfg: ExperimentConfig, out) -> list:
    records = []
    target = float(cfg.param("target", 0.05))
    which = cfg.param("benchmarks", ["duffing", "kg"])
    rows = []
    for eps in cfg.eps_values((0.1,)):
        for name in which:
            t0 = time.perf_counter()
            rec = Record("bench-speedup", eps, inputs={"benchmark": name, "target": target})
            if name == "duffing":
                res, info = bench_duffing(eps, float(cfg.param("duffing_t_end", 100.0)), target)
            elif name == "kg":
                res, info = bench_kg(eps, target)
            else:
                raise ValueError(f"unknown benchmark {name!r}")
            d, e = res["direct"], res["envelope"]
            rec.check("step_ratio", e.dt / d.dt, 10.0, kind="ge")
            rec.outputs = {
                "info": info,
                "direct": vars(d),
                "envelope": vars(e),
                "step_count_ratio": e.steps / d.steps,
                "wall_time_ratio": d.wall_time / max(e.wall_time, 1e-12),
            }
            rec.steps = {"direct": d.steps, "envelope": e.steps}
            for s in (d, e):
                rows.append((name, eps, s.solver, s.dt, s.steps, s.error, s.capped))
            rec.wall_time = time.perf_counter() - t0
            records.append(rec)
    if records:
        path = write_csv(out / "bench_speedup.csv", ["benchmark", "eps", "solver", "coarsest_dt", "steps", "error", "capped"], rows)
        records[0].artifacts.append(path.name)
    return records


SCENARIO_FUNCS = {
    "roots-table": roots_table,
    "euler-figure": euler_figure,
    "damped-table": damped_table,
    "duffing-figures": duffing_figures,
    "kg-packet": kg_packet,
    "fourth-order-packet": fourth_order_packet,
    "phase-matched-pair": phase_matched_pair,
    "maxwell-te": maxwell_te,
    "bench-speedup": bench_speedup,
}
