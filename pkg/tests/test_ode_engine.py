import numpy as np
import pytest
from scipy.integrate import solve_ivp
from hypothesis import given, settings
from hypothesis import strategies as st

from msm.errors import DivergenceFailure, DomainError, FitFailure, PreconditionError, StiffnessFailure
from msm.ode_engine import (
    ReferenceProblem,
    amplitude_solve,
    bvp_regular_expansion,
    cross_derivative_check,
    damped_linear_model,
    damped_linear_problem,
    damped_quadratic_model,
    damped_quadratic_problem,
    duffing_model,
    duffing_problem,
    fit_initial_conditions,
    reconstruct,
    reconstruction_imag,
    regular_expansion_damped,
    rk_reference_solve,
)

from oracles import BVP_X, BVP_Y_EPS005, damped_exact


@pytest.fixture(scope="module")
def damped_ref():
    return rk_reference_solve(damped_linear_problem(0.01, 400.0), 1e-12)


# --- reference solver -------------------------------------------------------


def test_reference_table_values(damped_ref):
    assert damped_ref(4.0) == pytest.approx(-0.6444, abs=5e-4)
    assert damped_ref(40.0) == pytest.approx(-0.5426, abs=5e-4)
    assert damped_ref(400.0) == pytest.approx(-0.0722, abs=5e-4)


def test_reference_against_closed_form(damped_ref):
    t = np.linspace(0, 400, 4001)
    assert np.max(np.abs(damped_ref(t) - damped_exact(t, 0.01))) < 1e-9


@pytest.mark.parametrize("tol", [1e-12, 1e-10, 1e-8])
def test_reference_undamped_is_cosine(tol):
    sol = rk_reference_solve(damped_linear_problem(0.0, 50.0), tol)
    t = np.linspace(0, 50, 997)
    # local error control: the global error over ~8 periods stays within a small multiple of tol
    assert np.max(np.abs(sol(t) - np.cos(t))) < 20 * tol


def test_reference_hermite_interpolation():
    sol = rk_reference_solve(damped_linear_problem(0.0, 50.0), 1e-12, interpolation="hermite")
    assert np.max(np.abs(sol(sol.t) - np.cos(sol.t))) < 1e-10
    t = np.linspace(0, 50, 997)
    # cubic Hermite between long DOP853 steps: O(h**4) interpolation error
    assert np.max(np.abs(sol(t) - np.cos(t))) < 1e-5


def test_reference_tolerance_precondition():
    p = damped_linear_problem(0.01, 10.0)
    for tol in (1e-14, 1e-5):
        with pytest.raises(PreconditionError):
            rk_reference_solve(p, tol)


def test_reference_stiffness_failure():
    # finite-time blow-up y'' = y**3 with a large start forces the step size to collapse
    p = ReferenceProblem("blowup", lambda t, y, dy, eps: y**3, 0.1, 10.0, 0.0, 10.0)
    with pytest.raises(StiffnessFailure):
        rk_reference_solve(p, 1e-10)


def test_problem_eps_range():
    with pytest.raises(DomainError):
        damped_linear_problem(0.6)


# --- regular expansions -----------------------------------------------------


def test_regular_expansion_table():
    assert regular_expansion_damped(4.0, 0.01) == pytest.approx(-0.6367, abs=5e-4)
    assert regular_expansion_damped(400.0, 0.01) == pytest.approx(0.5295, abs=5e-4)
    assert regular_expansion_damped(0.0, 0.3) == 1.0


def test_secular_breakdown(damped_ref):
    assert abs(regular_expansion_damped(4.0, 0.01) - damped_ref(4.0)) < 0.01
    assert abs(regular_expansion_damped(400.0, 0.01) - damped_ref(400.0)) > 0.5


def test_bvp_expansion():
    assert bvp_regular_expansion(1.0, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert bvp_regular_expansion(0.0, 0.0) == pytest.approx(np.e - 1, abs=1e-15)
    with pytest.raises(DomainError):
        bvp_regular_expansion(1.5, 0.1)


def _bvp_numeric(eps, x):
    sol = solve_ivp(lambda s, y: s - y - eps * y**2, (1.0, 0.0), [1.0], rtol=1e-12, atol=1e-14, dense_output=True)
    return sol.sol(x)[0]


def test_bvp_oracle_agrees_with_frozen_values():
    assert np.max(np.abs(_bvp_numeric(0.05, BVP_X) - BVP_Y_EPS005)) < 1e-8


def test_bvp_expansion_error_is_second_order():
    # the leading neglected term is eps**2 y2(x), largest at x=0 with y2(0) = 3.1250 (quadrature)
    for eps in (0.02, 0.01, 0.005):
        dev = np.max(np.abs(bvp_regular_expansion(BVP_X, eps) - _bvp_numeric(eps, BVP_X)))
        assert dev / eps**2 == pytest.approx(3.125, rel=0.1)


@pytest.mark.xfail(strict=True, reason="eps**2 y2(0) = 7.8e-3 already exceeds 5e-3 at eps=0.05; see notes")
def test_bvp_expansion_within_5e3_at_eps005():
    assert np.max(np.abs(bvp_regular_expansion(BVP_X, 0.05) - BVP_Y_EPS005)) < 5e-3


# --- amplitude models -------------------------------------------------------


@pytest.mark.parametrize("factory", [damped_linear_model, duffing_model, damped_quadratic_model])
def test_vector_field_is_order_eps(factory):
    m = factory()
    rng = np.random.default_rng(1)
    for _ in range(20):
        s = rng.uniform(-1, 1, m.dim) + (1j * rng.uniform(-1, 1, m.dim) if m.complex_state else 0)
        s = s * (2 / max(1.0, np.max(np.abs(s))) * rng.uniform(0, 1))
        ratios = [np.max(np.abs(m.vector_field(s, e))) / e for e in (1e-2, 1e-4, 1e-6)]
        assert max(ratios) < 100
        assert abs(ratios[-1] - ratios[-2]) <= 1e-3 * max(1.0, ratios[-1])


def test_damped_linear_amplitude_closed_form():
    m = damped_linear_model()
    a0 = np.array([0.5 - 0.02j])
    tr = amplitude_solve(m, a0, 0.05, 2000.0)
    t = np.array([0.0, 500.0, 2000.0])
    exact = a0[0] * np.exp(-0.025 * t) * np.exp(-1j * 0.05**2 * t / 8)
    assert np.max(np.abs(tr(t)[0] - exact)) < 1e-9
    assert tr.closed_form_error < 1e-9


def test_duffing_modulus_conserved():
    tr = amplitude_solve(duffing_model(), np.array([0.7 + 0.2j]), 0.1, 1000.0)
    t = np.linspace(0, 1000, 5001)
    assert np.max(np.abs(np.abs(tr(t)[0]) - abs(0.7 + 0.2j))) < 1e-10


def test_damped_quadratic_zero_b():
    m = damped_quadratic_model()
    eps = 0.1
    tr = amplitude_solve(m, np.array([0.8, 0.0]), eps, 50.0)
    t = np.linspace(0, 50, 201)
    s = tr(t)
    assert np.max(np.abs(s[1])) == 0.0
    ref = solve_ivp(lambda t, a: -eps * a**2 - 2 * eps**2 * a**3, (0, 50), [0.8], t_eval=t, rtol=1e-12, atol=1e-14)
    assert np.max(np.abs(s[0].real - ref.y[0])) < 1e-9


def test_first_order_damped_quadratic_closed_form():
    m = damped_quadratic_model().first_order()
    tr = amplitude_solve(m, np.array([0.6, 0.3]), 0.1, 100.0)
    assert tr.closed_form_error < 1e-9


def test_amplitude_window_and_blowup():
    with pytest.raises(PreconditionError):
        amplitude_solve(duffing_model(), np.array([0.5]), 0.1, 1001.0)
    # first-order A' = -eps A**2 from A(0) = -1 blows up at t = 1/eps
    with pytest.raises(DivergenceFailure):
        amplitude_solve(damped_quadratic_model().first_order(), np.array([-1.0, 0.0]), 0.5, 10.0)


def test_trajectory_window():
    tr = amplitude_solve(duffing_model(), np.array([0.5]), 0.1, 10.0)
    with pytest.raises(DomainError):
        tr(11.0)


# --- initial-condition fitting ----------------------------------------------


def test_fit_duffing():
    m = duffing_model()
    a = fit_initial_conditions(m, 1.0, 0.0, 0.0)
    assert a[0] == pytest.approx(0.5, abs=1e-14)
    a = fit_initial_conditions(m, 1.0, 0.0, 0.1)
    assert np.max(np.abs(m.ic_residual(a, 0.1, 1.0, 0.0))) <= 1e-12
    assert abs(a[0]) == pytest.approx(0.501577, abs=5e-6)


def test_fit_damped_linear():
    m = damped_linear_model()
    assert fit_initial_conditions(m, 1.0, 0.0, 0.0)[0] == pytest.approx(0.5)
    a = fit_initial_conditions(m, 1.0, 0.0, 0.1)
    assert a[0] == pytest.approx(0.5 - 0.025j, abs=1e-12)


def test_fit_failure():
    m = damped_quadratic_model()
    # the eps-truncated residual has no root for this data: y0 = 0, dy0 huge
    with pytest.raises(FitFailure):
        fit_initial_conditions(m, 0.0, 50.0, 0.5, max_iter=5)


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.0, 0.2))
def test_fit_property(y0, dy0, eps):
    m = duffing_model()
    if abs(y0) + abs(dy0) < 1e-3:
        return
    try:
        a = fit_initial_conditions(m, y0, dy0, eps)
    except FitFailure:
        assert eps * (y0**2 + dy0**2) > 0.1  # only large nonlinear data may fail
        return
    assert np.max(np.abs(m.ic_residual(a, eps, y0, dy0))) <= 1e-12


# --- reconstruction ---------------------------------------------------------


def test_reconstruction_formulas():
    t = np.linspace(0, 10, 7)
    a = 0.3 + 0.4j
    eps = 0.1
    y = reconstruct(duffing_model(), np.array([a]), t, eps)
    exp = 2 * (a * np.exp(1j * t) - eps * a**3 * np.exp(3j * t) / 8).real
    assert np.allclose(y, exp, atol=1e-15)
    y = reconstruct(damped_quadratic_model(), np.array([0.5, 0.2]), t, eps)
    assert np.allclose(y, 0.5 + 0.2 * np.exp(-t) - eps * 0.02 * np.exp(-2 * t), atol=1e-15)
    for f in (damped_linear_model, duffing_model):
        assert np.all(reconstruct(f(), np.array([0j]), t, eps) == 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 100), st.sampled_from([0, 1, 2]))
def test_reconstruction_reality(re, im, t, which):
    m = [damped_linear_model, duffing_model, damped_quadratic_model][which]()
    s = np.array([re + 1j * im]) if m.complex_state else np.array([re, im], dtype=complex)
    assert reconstruction_imag(m, s, np.array([t]), 0.1) <= 1e-14


def test_damped_linear_multiscale_uniform(damped_ref):
    m = damped_linear_model()
    a = fit_initial_conditions(m, 1.0, 0.0, 0.01)
    tr = amplitude_solve(m, a, 0.01, 400.0)
    t = np.linspace(0, 400, 20001)
    assert np.max(np.abs(reconstruct(m, tr, t, 0.01) - damped_ref(t))) < 0.01


def test_damped_quadratic_reconstruction_tracks_reference():
    eps = 0.1
    m = damped_quadratic_model()
    a = fit_initial_conditions(m, 1.0, 0.0, eps)
    tr = amplitude_solve(m, a, eps, 20.0)
    ref = rk_reference_solve(damped_quadratic_problem(eps, 20.0), 1e-12)
    t = np.linspace(0, 20, 401)
    assert np.max(np.abs(reconstruct(m, tr, t, eps) - ref(t))) < 0.02


def test_duffing_order_improvement():
    eps = 0.1
    m = duffing_model()
    a = fit_initial_conditions(m, 1.0, 0.0, eps)
    ref = rk_reference_solve(duffing_problem(eps, 1000.0), 1e-12)
    t = np.linspace(0, 100, 4001)
    e2 = np.max(np.abs(reconstruct(m, amplitude_solve(m, a, eps, 100.0), t, eps) - ref(t)))
    e1 = np.max(np.abs(reconstruct(m.first_order(), amplitude_solve(m.first_order(), a, eps, 100.0), t, eps) - ref(t)))
    assert e2 <= e1
    assert e2 < 0.1
    tl = np.linspace(990, 1000, 401)
    l2 = np.max(np.abs(reconstruct(m, amplitude_solve(m, a, eps, 1000.0), tl, eps) - ref(tl)))
    l1 = np.max(np.abs(reconstruct(m.first_order(), amplitude_solve(m.first_order(), a, eps, 1000.0), tl, eps) - ref(tl)))
    assert l1 > 5 * l2


# --- cross-derivative test ---------------------------------------------------


def test_cross_derivative_duffing_compatible():
    m = duffing_model()
    rng = np.random.default_rng(3)
    samples = [np.array([r * np.exp(1j * p)]) for r, p in zip(rng.uniform(0, 1, 12), rng.uniform(0, 6.3, 12))]
    rep = cross_derivative_check(m.f1, m.f2, samples)
    assert rep.residual <= 1e-6 and rep.compatible
    assert len(rep.trace) == 12


def test_cross_derivative_damped_quadratic_fails_by_two():
    m = damped_quadratic_model()
    rep = cross_derivative_check(m.f1, m.f2, [np.array([1.0, 1.0])])
    # d_t2 d_t1 A - d_t1 d_t2 A = 4 A**4 - 6 A**4
    assert rep.trace[0][0] == pytest.approx(-2.0, abs=1e-4)
    assert rep.residual == pytest.approx(2.0, abs=1e-4)
    assert not rep.compatible


@settings(max_examples=20, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_cross_derivative_self_commutes(a, b):
    m = damped_quadratic_model()
    rep = cross_derivative_check(m.f1, m.f1, [np.array([a, b])])
    assert 0 <= rep.residual <= 1e-6


def test_cross_derivative_needs_samples():
    with pytest.raises(ValueError):
        cross_derivative_check(duffing_model().f1, duffing_model().f2, [])
