import math
import warnings

import numpy as np
import pytest

from oracles import annulus_dnu, annulus_mode
from rtnrt.errors import GeometryError, ParameterError
from rtnrt.forward import (
    CauchyData,
    add_noise,
    concentric_annulus_oracle,
    evaluate_w_extension,
    excitation_fourier,
    excitation_values,
    solve_annular_dirichlet,
    solve_interior_dirichlet,
)
from rtnrt.geometry import make_circle, make_ellipse

# frozen from the 2x2 radial solves in tests/oracles.py
DNU_U_MODE1 = 1.09 / 0.91
DNU_W_MODE1 = 0.18 / 0.91
W_AT_07 = -0.07205651491365


def test_oracle_module_agrees_with_frozen_values():
    assert abs(annulus_dnu(1, 1.0, 0.3) - DNU_U_MODE1) < 1e-14
    assert abs(annulus_dnu(1, 1.0, 0.3) - 1.0 - DNU_W_MODE1) < 1e-14
    a, b = annulus_mode(1, 1.0, 0.3)
    assert abs((a - 1) * 0.7 + b / 0.7 - W_AT_07) < 1e-13


@pytest.mark.parametrize("f,expected", [
    (lambda t: np.cos(t), lambda t: np.cos(t)),
    (lambda t: np.ones_like(t), lambda t: np.zeros_like(t)),
    (lambda t: np.cos(3 * t), lambda t: 3 * np.cos(3 * t)),
])
def test_interior_neumann_on_unit_circle(omega, f, expected):
    sol = solve_interior_dirichlet(omega, f(omega.params))
    assert np.max(np.abs(sol.dnu - expected(omega.params))) < 1e-10


def test_interior_field_reproduces_harmonic_polynomial(omega):
    t = omega.params
    sol = solve_interior_dirichlet(omega, np.cos(3 * t))
    pts = np.array([[0.3, 0.2], [-0.5, 0.1], [0.0, -0.6]])
    z = pts[:, 0] + 1j * pts[:, 1]
    assert np.allclose(sol(pts), np.real(z**3), atol=1e-10)


def test_interior_on_ellipse_reproduces_linear_function():
    e = make_ellipse((0, 0), (0.8, 0.5), 0.3, 128)
    x = e.nodes[:, 0] + 2 * e.nodes[:, 1]
    sol = solve_interior_dirichlet(e, x)
    assert np.max(np.abs(sol.dnu - (e.normals[:, 0] + 2 * e.normals[:, 1]))) < 1e-9


def test_concentric_oracle_values(concentric_oracle):
    t = concentric_oracle.omega.params
    assert np.allclose(concentric_oracle.dnu_u, DNU_U_MODE1 * np.cos(t), atol=1e-14)
    assert np.allclose(concentric_oracle.dnu_v, np.cos(t), atol=1e-14)
    assert np.allclose(concentric_oracle.dnu_w, DNU_W_MODE1 * np.cos(t), atol=1e-14)


def test_oracle_mode_zero():
    data = concentric_annulus_oracle(1.0, 0.3, {0: 1.0}, 64)
    assert np.allclose(data.dnu_u, 1.0 / math.log(1.0 / 0.3), rtol=1e-14)
    assert np.allclose(data.dnu_v, 0.0)


def test_oracle_rejects_bad_radii():
    with pytest.raises(ParameterError):
        concentric_annulus_oracle(1.0, 1.2, {1: 1.0})


def test_solver_matches_oracle(concentric_solver, concentric_oracle):
    err = np.max(np.abs(concentric_solver.dnu_w - concentric_oracle.dnu_w))
    assert err / np.max(np.abs(concentric_oracle.dnu_w)) < 1e-10


def test_solver_multi_mode_matches_oracle(omega, concentric_obstacle):
    coeffs = {0: 0.5, 2: 1.0, -3: 0.25}
    exact = concentric_annulus_oracle(1.0, 0.3, coeffs, omega.n)
    data = solve_annular_dirichlet(omega, concentric_obstacle, exact.f)
    assert np.max(np.abs(data.dnu_u - exact.dnu_u)) < 1e-9


def test_field_matches_exact_solution_in_annulus(concentric_solver):
    sol = concentric_solver.solution
    ring = sol.obstacle.nodes * 1.5
    assert np.max(np.abs(sol.u(ring) - concentric_annulus_oracle(1.0, 0.3, {1: 1.0}).solution.u(ring))) < 1e-8


def test_flux_balance(offset_solver):
    sol = offset_solver.solution
    outer = offset_solver.net_flux("dnu_u")
    inner = float(np.dot(sol.obstacle.weights, sol.dnu_u_obstacle()))
    assert abs(outer - inner) < 1e-8


def test_offset_self_convergence(omega, offset_obstacle):
    fine = solve_annular_dirichlet(make_circle((0, 0), 1.0, 256), make_circle((0.15, 0), 0.25, 300), np.cos(
        make_circle((0, 0), 1.0, 256).params))
    coarse = solve_annular_dirichlet(omega, offset_obstacle, np.cos(omega.params))
    assert np.max(np.abs(fine.dnu_w[::2] - coarse.dnu_w)) < 1e-10


def test_vanishing_obstacle_limit(omega):
    errs = []
    for r in (0.1, 0.03, 0.01):
        data = solve_annular_dirichlet(omega, make_circle((0, 0), r, 64), np.cos(omega.params))
        errs.append(np.max(np.abs(data.dnu_w)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 1e-3


def test_obstacle_outside_rejected(omega):
    with pytest.raises(GeometryError):
        solve_annular_dirichlet(omega, make_circle((0.8, 0), 0.3, 64), np.cos(omega.params))


def test_w_extension_value(concentric_oracle, concentric_solver):
    assert abs(evaluate_w_extension(concentric_oracle, (0.7, 0.0)) - W_AT_07) < 1e-12
    assert abs(evaluate_w_extension(concentric_solver, (0.7, 0.0)) - W_AT_07) < 1e-9


def test_w_extension_matches_field_in_annulus(offset_solver):
    pts = np.array([[0.6, 0.3], [-0.7, 0.0], [0.0, -0.75]])
    assert np.allclose(evaluate_w_extension(offset_solver, pts), offset_solver.solution.w(pts), atol=1e-9)


def test_w_extension_guards(concentric_oracle):
    with pytest.raises(ParameterError):
        evaluate_w_extension(concentric_oracle, (1.0, 0.0))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        evaluate_w_extension(concentric_oracle, (0.99, 0.0))
    assert any(issubclass(r.category, RuntimeWarning) for r in rec)


def test_csv_round_trip(concentric_solver):
    back = CauchyData.from_csv(concentric_solver.to_csv())
    for name in ("f", "dnu_u", "dnu_v", "dnu_w"):
        assert np.max(np.abs(getattr(back, name) - getattr(concentric_solver, name))) <= 1e-12
    assert back.meta["generator"] == concentric_solver.meta["generator"]
    assert np.allclose(back.omega.nodes, concentric_solver.omega.nodes)


def test_cauchy_data_length_check(omega):
    with pytest.raises(ParameterError):
        CauchyData(omega, np.zeros(3), np.zeros(3), np.zeros(3), np.zeros(3))


def test_noise_is_deterministic(concentric_oracle):
    a = add_noise(concentric_oracle, 0.01, 5)
    b = add_noise(concentric_oracle, 0.01, 5)
    c = add_noise(concentric_oracle, 0.01, 6)
    assert np.array_equal(a.dnu_w, b.dnu_w)
    assert not np.array_equal(a.dnu_w, c.dnu_w)
    assert np.allclose(a.dnu_u, a.dnu_v + a.dnu_w)
    assert add_noise(concentric_oracle, 0.0, 5) is concentric_oracle


def test_noise_level_is_relative(concentric_oracle):
    noisy = add_noise(concentric_oracle, 0.1, 0)
    diff = noisy.dnu_w - concentric_oracle.dnu_w
    rms_w = np.sqrt(np.mean(concentric_oracle.dnu_w**2))
    assert 0.07 < np.sqrt(np.mean(diff**2)) / rms_w < 0.13


def test_excitations():
    t = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    assert np.allclose(excitation_values("cos", t), np.cos(t))
    series = excitation_fourier("exp_cos")
    approx = sum(c * np.cos(k * t) for k, c in series.items())
    assert np.allclose(approx, excitation_values("exp_cos", t), atol=1e-14)
    with pytest.raises(ParameterError):
        excitation_values("square", t)
