"""Discrete boundary operators between weighted inner-product spaces.

A node vector on a curve is paired with another through a Gram matrix. On
uniformly sampled smooth curves the Gram matrix weights Fourier mode k by
(1 + k²)^s, a computable stand-in for the trace-space norms of order s; on
graded polygon grids it falls back to the weighted L² product.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from . import layers
from ._backend import as_points, as_vector, kernels
from .errors import GeometryError, ParameterError, SpaceError
from .geometry import BoundaryCurve, strictly_inside

KERNEL_TAGS = ("single_layer_trace", "single_layer", "R", "R_star", "R_dual", "W_double_layer", "generic")


def fourier_multiplier(n: int, s: float) -> np.ndarray:
    """Symmetric circulant with eigenvalue (1 + k²)^s on mode k."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    eig = (1.0 + k * k) ** s
    col = np.real(np.fft.ifft(eig))
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return col[idx]


@dataclass(frozen=True, eq=False)
class InnerProductSpace:
    curve: BoundaryCurve | None
    sobolev_order: float
    gram: np.ndarray

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def cholesky(self) -> np.ndarray:
        """Lower-triangular L with gram = L Lᵀ."""
        try:
            return np.linalg.cholesky(self.gram)
        except np.linalg.LinAlgError as exc:
            raise SpaceError(f"Gram matrix is not positive definite: {exc}") from exc

    @cached_property
    def _cho(self):
        return cho_factor(self.gram, lower=True)

    def solve(self, rhs):
        return cho_solve(self._cho, rhs)

    def inner(self, a, b) -> float:
        return float(np.asarray(a) @ self.gram @ np.asarray(b))

    def norm(self, a) -> float:
        return float(np.sqrt(max(self.inner(a, a), 0.0)))

    @property
    def weights(self) -> np.ndarray:
        return self.curve.weights if self.curve is not None else np.ones(self.dim)


def euclidean_space(n: int) -> InnerProductSpace:
    return InnerProductSpace(None, 0.0, np.eye(n))


def make_space(curve: BoundaryCurve, s: float) -> InnerProductSpace:
    if s not in (-0.5, 0.0, 0.5):
        raise ParameterError(f"unsupported Sobolev order {s}")
    w = curve.weights
    if s == 0.0 or not curve.is_smooth:
        gram = np.diag(w)
    else:
        sq = np.sqrt(w)
        gram = sq[:, None] * fourier_multiplier(curve.n, s) * sq[None, :]
        gram = 0.5 * (gram + gram.T)
    gram.setflags(write=False)
    return InnerProductSpace(curve, float(s), gram)


@dataclass(frozen=True)
class SingularSystem:
    """μ_n with right vectors v_n (domain) and left vectors ψ_n (range):
    ``A v_n = μ_n ψ_n``, each family orthonormal in its Gram product."""

    mu: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @property
    def lam(self) -> np.ndarray:
        return self.mu**2

    def coefficients(self, op: "DiscreteOperator", b) -> np.ndarray:
        """b_n = ⟨ψ_n, b⟩ in the range Gram."""
        return self.left_vectors.T @ (op.range_space.gram @ np.asarray(b, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    matrix: np.ndarray
    domain_space: InnerProductSpace
    range_space: InnerProductSpace
    kernel_tag: str = "generic"

    def __post_init__(self):
        m, n = self.matrix.shape
        if m != self.range_space.dim or n != self.domain_space.dim:
            raise ParameterError(
                f"matrix shape {self.matrix.shape} does not match spaces "
                f"({self.range_space.dim}, {self.domain_space.dim})"
            )
        if self.kernel_tag not in KERNEL_TAGS:
            raise ParameterError(f"unknown kernel tag {self.kernel_tag!r}")

    def __matmul__(self, x):
        return self.matrix @ x

    @cached_property
    def svd(self) -> SingularSystem:
        return singular_system(self)


def _green_dnx(targets: BoundaryCurve, sources: BoundaryCurve, weighted=True) -> np.ndarray:
    """∂/∂n_x of the disk Green function between outer nodes x and inner nodes y."""
    w = sources.weights if weighted else np.ones(sources.n)
    if targets.kind == "circle" and targets.spec["radius"] == 1.0 and tuple(targets.spec["center"]) == (0.0, 0.0):
        return kernels.green_disk_dnx_unit(as_points(targets.nodes), as_points(sources.nodes), as_vector(w))
    gx, gy = kernels.green_disk_grad(as_points(targets.nodes), as_points(sources.nodes), as_vector(w))
    return targets.normals[:, 0, None] * gx + targets.normals[:, 1, None] * gy


def _check_inside(g_curve, omega):
    if not strictly_inside(g_curve, omega):
        raise GeometryError("test curve must lie strictly inside the outer boundary")


def assemble_single_layer(g_curve: BoundaryCurve, target=None, s_domain=-0.5) -> DiscreteOperator:
    """Disk-Green single layer with density on ``g_curve``.

    ``target`` may be ``None`` (trace on ``g_curve`` itself, log-singular
    quadrature) or an (M, 2) array of evaluation points / a curve.
    """
    w = g_curve.weights
    if target is None or target is g_curve:
        # G = Φ + (1/4π) log(1 - 2x·y + |x|²|y|²); only Φ is singular
        x = g_curve.nodes
        xy = x @ x.T
        x2 = np.sum(x * x, axis=1)
        q = 1.0 - 2.0 * xy + np.outer(x2, x2)
        mat = layers.single_layer_self(g_curve) + np.log(q) * w[None, :] / (4.0 * np.pi)
        return DiscreteOperator(
            mat, make_space(g_curve, s_domain), make_space(g_curve, 0.5), "single_layer_trace"
        )
    pts = target.nodes if isinstance(target, BoundaryCurve) else np.asarray(target, dtype=np.float64)
    mat = kernels.green_disk(as_points(pts), as_points(g_curve.nodes), as_vector(w))
    rng = make_space(target, 0.0) if isinstance(target, BoundaryCurve) else euclidean_space(len(pts))
    return DiscreteOperator(mat, make_space(g_curve, s_domain), rng, "single_layer")


def assemble_R(g_curve: BoundaryCurve, omega: BoundaryCurve) -> DiscreteOperator:
    """Normal derivative on the outer boundary of the disk-Green single layer."""
    _check_inside(g_curve, omega)
    mat = _green_dnx(omega, g_curve)
    return DiscreteOperator(mat, make_space(g_curve, -0.5), make_space(omega, -0.5), "R")


def assemble_adjoint(op: DiscreteOperator) -> DiscreteOperator:
    """Adjoint with respect to the two Gram products: G_dom⁻¹ Aᵀ G_rng."""
    mat = op.domain_space.solve(op.matrix.T @ op.range_space.gram)
    tag = {"R": "R_star", "R_star": "R"}.get(op.kernel_tag, op.kernel_tag)
    return DiscreteOperator(mat, op.range_space, op.domain_space, tag)


def assemble_R_dual(omega: BoundaryCurve, g_curve: BoundaryCurve) -> DiscreteOperator:
    """Transpose of R in the weighted L² pairing: entries w_i ∂G/∂n_x(x_i, y_j)."""
    _check_inside(g_curve, omega)
    kern = _green_dnx(omega, g_curve, weighted=False)
    mat = kern.T * omega.weights[None, :]
    return DiscreteOperator(mat, make_space(omega, 0.5), make_space(g_curve, 0.5), "R_dual")


def duality_map(space: InnerProductSpace) -> np.ndarray:
    """Riesz map into the dual realized through the weighted L² pairing: W⁻¹ G."""
    return space.gram / space.weights[:, None]


def inverse_duality_map(space: InnerProductSpace) -> np.ndarray:
    return space.solve(np.diag(space.weights))


def assemble_W(omega: BoundaryCurve, target=None) -> DiscreteOperator:
    """Free-space double layer with density on ``omega``.

    With ``target=None`` returns the interior trace ``K - 1/2``; otherwise
    field values at the target points / curve nodes.
    """
    if target is None or target is omega:
        mat = layers.double_layer_self(omega) - 0.5 * np.eye(omega.n)
        space = make_space(omega, 0.0)
        return DiscreteOperator(mat, space, space, "W_double_layer")
    pts = target.nodes if isinstance(target, BoundaryCurve) else np.asarray(target, dtype=np.float64)
    mat = layers.double_layer(pts, omega)
    rng = make_space(target, 0.0) if isinstance(target, BoundaryCurve) else euclidean_space(len(pts))
    return DiscreteOperator(mat, make_space(omega, 0.0), rng, "W_double_layer")


def w_fit_residual(omega: BoundaryCurve, target: BoundaryCurve, values) -> float:
    """Weighted least-squares residual of fitting ``values`` on ``target`` by
    double-layer fields with density on the nodes of ``omega``."""
    sw = np.sqrt(target.weights)
    mat = sw[:, None] * assemble_W(omega, target).matrix
    rhs = sw * np.asarray(values, dtype=np.float64)
    coef, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    return float(np.linalg.norm(mat @ coef - rhs))


def singular_system(op: DiscreteOperator) -> SingularSystem:
    lx = op.domain_space.cholesky
    ly = op.range_space.cholesky
    # Ã = L_Yᵀ A L_X⁻ᵀ
    at = solve_triangular(lx, (ly.T @ op.matrix).T, lower=True).T
    u, mu, vt = np.linalg.svd(at, full_matrices=False)
    right = solve_triangular(lx.T, vt.T, lower=False)
    left = solve_triangular(ly.T, u, lower=False)
    return SingularSystem(mu, left, right)


def filter_coefficients(mu, bn, alpha):
    return mu * bn / (alpha + mu * mu)


def tikhonov_solve(op: DiscreteOperator, b, alpha: float) -> np.ndarray:
    """Minimizer of α‖φ‖² + ‖Aφ - b‖² in the Gram norms."""
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    ss = op.svd
    bn = ss.coefficients(op, b)
    return ss.right_vectors @ filter_coefficients(ss.mu, bn, alpha)


_MAGIC = b"RTNRTMAT"


def dump_matrix(path, matrix) -> None:
    """Write ``matrix`` as a little-endian float64 blob after a 16-byte header
    (8-byte magic, uint32 rows, uint32 cols)."""
    a = np.atleast_2d(np.asarray(matrix, dtype="<f8"))
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<II", a.shape[0], a.shape[1]))
        fh.write(np.ascontiguousarray(a).tobytes())


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if head[:8] != _MAGIC:
            raise ParameterError("not a matrix dump")
        rows, cols = struct.unpack("<II", head[8:])
        return np.frombuffer(fh.read(), dtype="<f8").reshape(rows, cols).copy()
