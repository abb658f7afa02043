"""Synthetic Cauchy data for the Laplace equation outside a sound-soft obstacle.

Two generators are provided: a boundary-integral solver for general obstacles
and an exact separation-of-variables solution for concentric circles.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import layers
from .errors import GeometryError, ParameterError, SolverError
from .geometry import BoundaryCurve, curve_from_record, make_circle, strictly_inside

COND_WARN = 1e12


@dataclass(eq=False)
class CauchyData:
    """Dirichlet and Neumann traces on the outer boundary.

    ``dnu_w`` is the difference between the Neumann traces with and without
    the obstacle. ``solution`` optionally keeps the object that produced the
    data (solver densities or the exact annulus solution) for diagnostics
    that need values off the outer boundary.
    """

    omega: BoundaryCurve
    f: np.ndarray
    dnu_u: np.ndarray
    dnu_v: np.ndarray
    dnu_w: np.ndarray
    meta: dict = field(default_factory=dict)
    solution: object = None

    def __post_init__(self):
        n = self.omega.n
        for name in ("f", "dnu_u", "dnu_v", "dnu_w"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(-1)
            if arr.shape[0] != n:
                raise ParameterError(f"{name} has length {arr.shape[0]}, expected {n}")
            setattr(self, name, arr)

    def with_dnu_w(self, dnu_w, **meta) -> "CauchyData":
        """Copy with replaced ``dnu_w`` (and ``dnu_u`` kept consistent)."""
        dnu_w = np.asarray(dnu_w, dtype=np.float64)
        return CauchyData(
            self.omega, self.f, self.dnu_v + dnu_w, self.dnu_v, dnu_w, {**self.meta, **meta}, self.solution
        )

    def net_flux(self, which="dnu_v") -> float:
        return float(np.dot(self.omega.weights, getattr(self, which)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = {"omega": self.omega.to_record(), **self.meta}
        buf.write("# " + json.dumps(header, sort_keys=True, default=_json_default) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "f", "dnu_u", "dnu_v", "dnu_w"])
        for row in zip(self.omega.params, self.f, self.dnu_u, self.dnu_v, self.dnu_w):
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CauchyData":
        lines = text.splitlines()
        header = json.loads(lines[0][1:].strip())
        omega = curve_from_record(header.pop("omega"))
        rows = list(csv.reader(lines[2:]))
        cols = np.array(rows, dtype=np.float64)
        return cls(omega, cols[:, 1], cols[:, 2], cols[:, 3], cols[:, 4], header)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o))


@dataclass(eq=False)
class LayerField:
    """Harmonic field written as a sum of layer potentials.

    ``terms`` holds ``(curve, density, kind)`` with kind ``"single"`` or
    ``"double"``. Evaluation is valid away from the source curves.
    """

    terms: list

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        out = np.zeros(len(pts))
        for curve, dens, kind in self.terms:
            mat = layers.single_layer(pts, curve) if kind == "single" else layers.double_layer(pts, curve)
            out += mat @ dens
        return out

    def gradient(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        out = np.zeros((len(pts), 2))
        for curve, dens, kind in self.terms:
            sx, sy, dx, dy = layers.layer_gradients(pts, curve)
            if kind == "single":
                out[:, 0] += sx @ dens
                out[:, 1] += sy @ dens
            else:
                out[:, 0] += dx @ dens
                out[:, 1] += dy @ dens
        return out


HarmonicFieldRep = LayerField


def _solve(mat, rhs, what):
    try:
        lu_cond = np.linalg.cond(mat)
        sol = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"{what}: singular system ({exc})") from exc
    if not np.all(np.isfinite(sol)):
        raise SolverError(f"{what}: non-finite solution, condition number {lu_cond:.3e}")
    return sol, lu_cond


@dataclass(eq=False)
class InteriorSolution:
    field: LayerField
    density: np.ndarray
    dnu: np.ndarray
    condition: float

    def __call__(self, points):
        return self.field(points)


def solve_interior_dirichlet(omega: BoundaryCurve, f) -> InteriorSolution:
    """Harmonic extension of ``f`` into the region bounded by ``omega``.

    Uses a double-layer density with the interior jump relation; the
    returned object carries the Neumann trace at the nodes.
    """
    f = np.asarray(f, dtype=np.float64)
    k = layers.double_layer_self(omega)
    mat = k - 0.5 * np.eye(omega.n)
    tau, cond = _solve(mat, f, "interior Dirichlet problem")
    dnu = layers.hypersingular_self(omega) @ tau
    return InteriorSolution(LayerField([(omega, tau, "double")]), tau, dnu, cond)


@dataclass(eq=False)
class AnnularSolution:
    """Densities of the combined-layer representation of the annular solution.

    ``u = D_Ω[σ_Ω] + (D_D + S_D)[σ_D]``.
    """

    omega: BoundaryCurve
    obstacle: BoundaryCurve
    sigma_omega: np.ndarray
    sigma_obstacle: np.ndarray
    interior: InteriorSolution
    condition: float

    @property
    def u(self) -> LayerField:
        return LayerField(
            [
                (self.omega, self.sigma_omega, "double"),
                (self.obstacle, self.sigma_obstacle, "double"),
                (self.obstacle, self.sigma_obstacle, "single"),
            ]
        )

    @property
    def v(self) -> LayerField:
        return self.interior.field

    def w(self, points):
        return self.u(points) - self.v(points)

    def dnu_u_obstacle(self) -> np.ndarray:
        """∂u/∂n on the obstacle boundary, normal pointing out of the obstacle."""
        d = self.obstacle
        s = layers.single_layer_self(d)
        t = layers.hypersingular_self(d, single=s)
        kp = layers.adjoint_double_layer_self(d)
        own = t + kp - 0.5 * np.eye(d.n)
        cross = layers.double_layer_dn(d.nodes, d.normals, self.omega)
        return own @ self.sigma_obstacle + cross @ self.sigma_omega

    def v_on_obstacle(self) -> np.ndarray:
        return self.v(self.obstacle.nodes)

    def dnu_v_obstacle(self) -> np.ndarray:
        g = self.v.gradient(self.obstacle.nodes)
        return np.sum(g * self.obstacle.normals, axis=1)


def solve_annular_dirichlet(omega: BoundaryCurve, obstacle: BoundaryCurve, f, *, meta=None) -> CauchyData:
    """Solve Δu = 0 between ``obstacle`` and ``omega`` with u = f outside, u = 0 on the obstacle."""
    if not strictly_inside(obstacle, omega):
        raise GeometryError("obstacle must lie strictly inside the outer boundary")
    f = np.asarray(f, dtype=np.float64)
    n1, n2 = omega.n, obstacle.n

    a11 = layers.double_layer_self(omega) - 0.5 * np.eye(n1)
    a12 = layers.double_layer(omega.nodes, obstacle) + layers.single_layer(omega.nodes, obstacle)
    a21 = layers.double_layer(obstacle.nodes, omega)
    s_dd = layers.single_layer_self(obstacle)
    a22 = layers.double_layer_self(obstacle) + 0.5 * np.eye(n2) + s_dd
    mat = np.block([[a11, a12], [a21, a22]])
    rhs = np.concatenate([f, np.zeros(n2)])
    sol, cond = _solve(mat, rhs, "annular Dirichlet problem")
    sigma1, sigma2 = sol[:n1], sol[n1:]

    t_omega = layers.hypersingular_self(omega)
    cross = layers.double_layer_dn(omega.nodes, omega.normals, obstacle) + layers.single_layer_dn(
        omega.nodes, omega.normals, obstacle
    )
    dnu_u = t_omega @ sigma1 + cross @ sigma2

    interior = solve_interior_dirichlet(omega, f)
    dnu_v = interior.dnu
    info = {
        "generator": f"solver(N_omega={n1},N_obstacle={n2})",
        "obstacle": obstacle.to_record(),
        "condition": cond,
    }
    if cond > COND_WARN:
        info["ill_conditioned"] = True
        warnings.warn(f"annular system condition number {cond:.3e} exceeds {COND_WARN:.0e}", RuntimeWarning)
    if meta:
        info.update(meta)
    solution = AnnularSolution(omega, obstacle, sigma1, sigma2, interior, cond)
    return CauchyData(omega, f, dnu_u, dnu_v, dnu_u - dnu_v, info, solution)


# ---------------------------------------------------------------- exact data


def _fourier_eval(coeffs: dict, theta):
    theta = np.asarray(theta, dtype=np.float64)
    out = np.zeros_like(theta)
    for k, c in coeffs.items():
        k = int(k)
        out += c * (np.cos(k * theta) if k >= 0 else np.sin(-k * theta))
    return out


@dataclass(eq=False)
class AnnulusSolution:
    """Closed-form solution between concentric circles centred at the origin.

    Each Fourier key ``k >= 0`` stands for cos(kθ), ``k < 0`` for sin(|k|θ).
    Per mode the radial factor is ``a r^n + b r^-n`` (``a + b log r`` for
    n = 0) for u, and ``f_n (r/R)^n`` for the obstacle-free field v.
    """

    r_omega: float
    r_d: float
    coeffs: dict

    def _modes(self):
        ro, rd = self.r_omega, self.r_d
        for key, fk in self.coeffs.items():
            key = int(key)
            n = abs(key)
            if n == 0:
                b = fk / math.log(ro / rd)
                yield key, n, -b * math.log(rd), b
            else:
                # a rd^n + b rd^-n = 0, a ro^n + b ro^-n = fk
                a = fk / (ro**n - rd ** (2 * n) * ro ** (-n))
                yield key, n, a, -a * rd ** (2 * n)

    @staticmethod
    def _angular(key, theta):
        return np.cos(key * theta) if key >= 0 else np.sin(-key * theta)

    def u(self, points):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        r = np.hypot(pts[:, 0], pts[:, 1])
        th = np.arctan2(pts[:, 1], pts[:, 0])
        out = np.zeros(len(pts))
        for key, n, a, b in self._modes():
            radial = a + b * np.log(r) if n == 0 else a * r**n + b * r ** (-n)
            out += radial * self._angular(key, th)
        return out

    def v(self, points):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        r = np.hypot(pts[:, 0], pts[:, 1])
        th = np.arctan2(pts[:, 1], pts[:, 0])
        out = np.zeros(len(pts))
        for key, fk in self.coeffs.items():
            key = int(key)
            out += fk * (r / self.r_omega) ** abs(key) * self._angular(key, th)
        return out

    def w(self, points):
        return self.u(points) - self.v(points)

    def dr_u(self, r, theta):
        out = np.zeros_like(np.asarray(theta, dtype=np.float64))
        for key, n, a, b in self._modes():
            radial = b / r if n == 0 else n * (a * r ** (n - 1) - b * r ** (-n - 1))
            out += radial * self._angular(key, theta)
        return out

    def dr_v(self, r, theta):
        out = np.zeros_like(np.asarray(theta, dtype=np.float64))
        for key, fk in self.coeffs.items():
            key = int(key)
            n = abs(key)
            out += fk * n * r ** (n - 1) / self.r_omega**n * self._angular(key, theta)
        return out


def concentric_annulus_oracle(r_omega, r_d, fourier_coeffs, n: int = 128) -> CauchyData:
    """Exact Cauchy data for circles of radii ``r_d < r_omega`` about the origin."""
    if not 0 < r_d < r_omega:
        raise ParameterError("need 0 < r_d < r_omega")
    omega = make_circle((0.0, 0.0), r_omega, n)
    sol = AnnulusSolution(float(r_omega), float(r_d), {int(k): float(v) for k, v in fourier_coeffs.items()})
    th = omega.params
    f = _fourier_eval(sol.coeffs, th)
    dnu_u = sol.dr_u(r_omega, th)
    dnu_v = sol.dr_v(r_omega, th)
    meta = {
        "generator": "oracle",
        "obstacle": {"kind": "circle", "parameters": {"center": [0.0, 0.0], "radius": float(r_d)}},
        "fourier": {str(k): v for k, v in sol.coeffs.items()},
    }
    return CauchyData(omega, f, dnu_u, dnu_v, dnu_u - dnu_v, meta, sol)


# ----------------------------------------------------------- excitations


def excitation_values(name_or_coeffs, theta):
    """Boundary data on the unit circle from a preset name or Fourier map."""
    if isinstance(name_or_coeffs, dict):
        return _fourier_eval({int(k): float(v) for k, v in name_or_coeffs.items()}, theta)
    if name_or_coeffs == "cos":
        return np.cos(theta)
    if name_or_coeffs == "exp_cos":
        return np.exp(np.cos(theta)) * np.cos(np.sin(theta))
    raise ParameterError(f"unknown excitation {name_or_coeffs!r}")


def excitation_fourier(name_or_coeffs, kmax: int = 30) -> dict:
    if isinstance(name_or_coeffs, dict):
        return {int(k): float(v) for k, v in name_or_coeffs.items()}
    if name_or_coeffs == "cos":
        return {1: 1.0}
    if name_or_coeffs == "exp_cos":
        # Re exp(z) on |z| = 1
        return {k: 1.0 / math.factorial(k) for k in range(kmax + 1)}
    raise ParameterError(f"unknown excitation {name_or_coeffs!r}")


def add_noise(data: CauchyData, level: float, seed: int) -> CauchyData:
    """Additive Gaussian noise on dnu_w, scaled relative to its RMS value."""
    if level <= 0:
        return data
    rng = np.random.default_rng(seed)
    w = data.dnu_w
    rms = math.sqrt(float(np.dot(data.omega.weights, w * w)) / data.omega.perimeter)
    noisy = w + level * rms * rng.standard_normal(w.shape)
    return data.with_dnu_w(noisy, noise_level=level, noise_sigma=level * rms, seed=seed)


# ------------------------------------------------------------ continuation


def _laurent_coefficients(data: CauchyData, rel_cutoff: float):
    omega = data.omega
    if omega.kind != "circle":
        raise ParameterError("the continuation of w needs a circular outer boundary")
    n = omega.n
    radius = omega.spec["radius"]
    g = np.fft.rfft(radius * data.dnu_w) / n
    g[1:] *= 2.0  # one-sided complex amplitudes: dnu_w = g0 + Re Σ g_k e^{ikθ}
    if n % 2 == 0:
        g[-1] *= 0.5
    scale = np.max(np.abs(g)) if g.size else 0.0
    if scale == 0.0:
        return 0.0, np.zeros(0, dtype=complex)
    keep = np.abs(g) >= rel_cutoff * scale
    g = np.where(keep, g, 0.0)
    # w = Re[g0 log ζ + Σ (g_k / 2k)(ζ^k - conj(ζ)^-k)]
    k = np.arange(len(g))
    amps = np.zeros(len(g), dtype=complex)
    amps[1:] = g[1:] / (2.0 * k[1:])
    return float(np.real(g[0])), amps


def _to_unit(data, z):
    c = np.asarray(data.omega.spec["center"], dtype=np.float64)
    r = data.omega.spec["radius"]
    z = np.asarray(z, dtype=np.float64).reshape(-1, 2)
    return ((z[:, 0] - c[0]) + 1j * (z[:, 1] - c[1])) / r, r


def _near_boundary_check(data, zeta, r):
    spacing = 2.0 * math.pi / data.omega.n
    if np.any(1.0 - np.abs(zeta) < 2.0 * spacing):
        warnings.warn("evaluation point within two node spacings of the outer boundary", RuntimeWarning)


def laurent_derivative(data: CauchyData, z, order: int, rel_cutoff: float = 1e-12):
    """Complex ``order``-th derivative (in physical units) of the holomorphic
    function whose real part continues w inward from the outer boundary."""
    g0, amps = _laurent_coefficients(data, rel_cutoff)
    zeta, r = _to_unit(data, z)
    out = np.zeros(len(zeta), dtype=complex)
    ell = int(order)
    if ell == 0:
        out += g0 * np.log(zeta)
    else:
        out += g0 * (-1) ** (ell - 1) * math.factorial(ell - 1) / zeta**ell
    for k in np.nonzero(amps)[0]:
        a = amps[k]
        if ell <= k:
            pos = math.factorial(k) / math.factorial(k - ell) * zeta ** (k - ell)
        else:
            pos = 0.0
        neg = (-1) ** ell * math.factorial(k + ell - 1) / math.factorial(k - 1) * zeta ** (-k - ell)
        out += a * pos - np.conj(a) * neg
    return out / r**ell


def evaluate_w_extension(data: CauchyData, z, rel_cutoff: float = 1e-12):
    """Harmonic continuation of w = u - v inward from the outer circle.

    The continuation is rebuilt from ``dnu_w`` alone using w = 0 on the outer
    boundary; it converges up to the innermost singularity of w.
    """
    zeta, r = _to_unit(data, z)
    if np.any(np.abs(zeta) >= 1.0):
        raise ParameterError("z must lie strictly inside the outer boundary")
    _near_boundary_check(data, zeta, r)
    val = np.real(laurent_derivative(data, z, 0, rel_cutoff))
    return float(val[0]) if np.ndim(z) == 1 else val
