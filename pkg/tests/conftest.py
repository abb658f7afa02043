import numpy as np
import pytest

from rtnrt.forward import concentric_annulus_oracle, solve_annular_dirichlet
from rtnrt.geometry import make_circle, make_convex_polygon

TRIANGLE = np.array([[0.0, 0.3], [-0.25980762113533157, -0.15], [0.25980762113533157, -0.15]])

_acceptance = {}


@pytest.fixture(scope="session")
def omega():
    return make_circle((0.0, 0.0), 1.0, 128)


@pytest.fixture(scope="session")
def concentric_obstacle():
    return make_circle((0.0, 0.0), 0.3, 150)


@pytest.fixture(scope="session")
def concentric_solver(omega, concentric_obstacle):
    return solve_annular_dirichlet(omega, concentric_obstacle, np.cos(omega.params))


@pytest.fixture(scope="session")
def concentric_oracle():
    return concentric_annulus_oracle(1.0, 0.3, {1: 1.0}, 128)


@pytest.fixture(scope="session")
def offset_obstacle():
    return make_circle((0.15, 0.0), 0.25, 150)


@pytest.fixture(scope="session")
def offset_solver(omega, offset_obstacle):
    return solve_annular_dirichlet(omega, offset_obstacle, np.cos(omega.params))


@pytest.fixture(scope="session")
def triangle():
    return make_convex_polygon(TRIANGLE, 128, 7)


@pytest.fixture(scope="session")
def triangle_solver(omega, triangle):
    return solve_annular_dirichlet(omega, triangle, np.cos(omega.params))


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(_acceptance):
        tr.write_line(f"{'PASS' if _acceptance[name] == 'passed' else 'FAIL'}  {name}")
    passed = sum(v == "passed" for v in _acceptance.values())
    tr.write_line(f"{passed}/{len(_acceptance)} criteria met")
