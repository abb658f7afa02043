"""Range-test and no-response-test indicators for a single test domain.

Both tests reduce to the singular system of the operator R that maps a
density on the test curve to the normal derivative, on the outer boundary, of
its disk-Green single layer. With b_n the coefficients of the data along the
left singular vectors:

* RT:  ‖φ_α‖² = Σ (μ_n b_n / (α + μ_n²))²   along a decreasing α schedule
* NRT: J(τ)²  = Σ_{μ_n² > τ μ_1²} b_n² / μ_n²   along a decreasing τ ladder

Finiteness is decided from the log-log growth rate of either statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import layers
from .errors import ConsistencyError, DegenerateOperatorError, ParameterError
from .forward import CauchyData, laurent_derivative
from .geometry import BoundaryCurve, TestDomain
from .kernels import ELL_MAX
from .operators import DiscreteOperator, assemble_R, assemble_W, filter_coefficients

FINITE = "finite"
INFINITE = "infinite"

SLOPE_THRESHOLD = 0.05
WINDOW = 10
TRUNCATION = 1e-12
TAU_LADDER = tuple(10.0 ** (-6.0 - 0.5 * m) for m in range(13))
NRT_WINDOW = 9
MONOTONE_RTOL = 1e-12


@dataclass(frozen=True)
class Schedule:
    alpha0: float = 1e-2
    q: float = 0.5
    K: int = 40

    def __post_init__(self):
        if not self.alpha0 > 0 or not 0 < self.q < 1 or self.K < 1:
            raise ParameterError("schedule needs alpha0 > 0, 0 < q < 1, K >= 1")

    @property
    def alphas(self) -> np.ndarray:
        return self.alpha0 * self.q ** np.arange(self.K + 1)


@dataclass(frozen=True)
class RegularizationPath:
    alphas: np.ndarray
    norms: np.ndarray
    residuals: np.ndarray
    diffs: np.ndarray
    coefficients: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class IndicatorResult:
    value: float
    classification: str
    slope: float
    path: object = None
    extra: dict = field(default_factory=dict)

    @property
    def is_finite(self) -> bool:
        return self.classification == FINITE


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x (0 for an all-zero y)."""
    y = np.asarray(y, dtype=np.float64)
    if np.all(y == 0):
        return 0.0
    tiny = np.finfo(float).tiny
    lx = np.log(np.asarray(x, dtype=np.float64))
    ly = np.log(np.maximum(y, tiny))
    return float(np.polyfit(lx, ly, 1)[0])


def rt_path(R: DiscreteOperator, b, schedule: Schedule = Schedule()) -> RegularizationPath:
    ss = R.svd
    mu = ss.mu
    bn = ss.coefficients(R, b)
    b_norm2 = R.range_space.inner(b, b)
    outside = max(b_norm2 - float(bn @ bn), 0.0)
    alphas = schedule.alphas
    coef = np.array([filter_coefficients(mu, bn, a) for a in alphas])
    norms = np.linalg.norm(coef, axis=1)
    resid = np.sqrt(np.sum((mu * coef - bn) ** 2, axis=1) + outside)
    diffs = np.concatenate([[0.0], np.linalg.norm(np.diff(coef, axis=0), axis=1)])
    return RegularizationPath(alphas, norms, resid, diffs, coef)


def classify_path(path: RegularizationPath, slope_threshold=SLOPE_THRESHOLD, window=WINDOW) -> IndicatorResult:
    norms = path.norms
    if len(norms) < window:
        raise ParameterError(f"path has {len(norms)} points, window needs {window}")
    drops = norms[:-1] - norms[1:]
    if np.any(drops > MONOTONE_RTOL * np.maximum(norms[:-1], 1e-300)):
        raise ConsistencyError("regularized norms are not monotone along the schedule")
    slope = loglog_slope(1.0 / path.alphas[-window:], norms[-window:])
    finite = slope < slope_threshold
    return IndicatorResult(float(norms[-1]) if finite else math.inf, FINITE if finite else INFINITE, slope, path)


def noise_delta(data: CauchyData, R: DiscreteOperator) -> float:
    """Expected range-space norm of the additive noise recorded in ``data.meta``
    (0 for clean data): σ² E‖e‖² = σ² trace(Gram)."""
    sigma = float(data.meta.get("noise_sigma", 0.0))
    return sigma * math.sqrt(float(np.trace(R.range_space.gram))) if sigma > 0 else 0.0


def morozov_cut(path: RegularizationPath, delta: float, window=WINDOW) -> RegularizationPath:
    """Stop the path at the first α whose residual reaches ``delta`` (kept at
    least ``window`` points long)."""
    if delta <= 0:
        return path
    hit = np.nonzero(path.residuals <= delta)[0]
    if hit.size == 0:
        return path
    k = max(int(hit[0]) + 1, window)
    coef = None if path.coefficients is None else path.coefficients[:k]
    return RegularizationPath(path.alphas[:k], path.norms[:k], path.residuals[:k], path.diffs[:k], coef)


def _test_operator(data: CauchyData, g) -> DiscreteOperator:
    curve = g.curve if isinstance(g, TestDomain) else g
    return assemble_R(curve, data.omega)


def rt_indicator(data: CauchyData, g, schedule: Schedule = Schedule(), *, R=None, **kw) -> IndicatorResult:
    """RT classification of one test domain; noisy data stop the path early."""
    R = _test_operator(data, g) if R is None else R
    path = morozov_cut(rt_path(R, data.dnu_w, schedule), noise_delta(data, R), kw.get("window", WINDOW))
    return classify_path(path, **kw)


def variant_threshold(schedule: Schedule, window=WINDOW, slope_threshold=SLOPE_THRESHOLD) -> float:
    """Tail-difference level that matches the slope threshold for power-law growth."""
    return 1.0 - schedule.q ** ((window - 1) * slope_threshold)


def rt_variant_indicator(
    data: CauchyData, g, schedule: Schedule = Schedule(), *, R=None, window=WINDOW, slope_threshold=SLOPE_THRESHOLD
) -> IndicatorResult:
    """Cauchy-type criterion: sup over later α of ‖φ_α - φ_β‖ on the tail,
    relative to the final norm. Tends to 0 exactly when the path converges."""
    R = _test_operator(data, g) if R is None else R
    path = rt_path(R, data.dnu_w, schedule)
    coef = path.coefficients
    k0 = len(coef) - window
    last = float(np.linalg.norm(coef[-1]))
    if last == 0.0:
        stat = 0.0
    else:
        stat = float(np.max(np.linalg.norm(coef[k0 + 1 :] - coef[k0], axis=1))) / last
    thr = variant_threshold(schedule, window, slope_threshold)
    finite = stat < thr
    return IndicatorResult(
        0.0 if finite else math.inf, FINITE if finite else INFINITE, stat, path, {"threshold": thr}
    )


def _kept(R: DiscreteOperator, tau: float) -> np.ndarray:
    lam = R.svd.mu ** 2
    if lam.size == 0 or lam[0] == 0.0:
        raise DegenerateOperatorError("operator has no nonzero singular values")
    keep = lam > tau * lam[0]
    if not np.any(keep):
        raise DegenerateOperatorError("every mode is below the truncation level")
    return keep


def nrt_pre_indicator(R: DiscreteOperator, b, tau: float = TRUNCATION) -> float:
    """sup |⟨ζ, b⟩| over ζ spanned by the retained left singular vectors with
    ‖R*ζ‖ ≤ 1; the maximizer is explicit, so this is the attained value."""
    keep = _kept(R, tau)
    ss = R.svd
    bn = ss.coefficients(R, b)[keep]
    return float(np.sqrt(np.sum(bn**2 / ss.mu[keep] ** 2)))


def nrt_maximizer(R: DiscreteOperator, b, tau: float = TRUNCATION) -> np.ndarray:
    keep = _kept(R, tau)
    ss = R.svd
    bn = ss.coefficients(R, b)[keep]
    c = bn / ss.mu[keep] ** 2
    nrm = np.sqrt(np.sum(c**2 * ss.mu[keep] ** 2))
    if nrm == 0.0:
        return np.zeros(R.range_space.dim)
    return ss.left_vectors[:, keep] @ (c / nrm)


def duality_gap(R: DiscreteOperator, b, schedule: Schedule = Schedule(), tau: float = TRUNCATION) -> float:
    """|‖φ_{α_K}‖ - J| / J with one spectral truncation applied to both sides."""
    keep = _kept(R, tau)
    ss = R.svd
    bn = ss.coefficients(R, b)[keep]
    mu = ss.mu[keep]
    phi = float(np.linalg.norm(filter_coefficients(mu, bn, schedule.alphas[-1])))
    j = float(np.sqrt(np.sum(bn**2 / mu**2)))
    eps = np.finfo(float).tiny
    return abs(phi - j) / max(j, eps) if j > 0 else abs(phi)


def nrt_indicator(
    data: CauchyData,
    g,
    taus=TAU_LADDER,
    *,
    R=None,
    slope_threshold=SLOPE_THRESHOLD,
    window=NRT_WINDOW,
) -> IndicatorResult:
    R = _test_operator(data, g) if R is None else R
    taus = np.asarray(taus, dtype=np.float64)
    js = np.array([nrt_pre_indicator(R, data.dnu_w, t) for t in taus])
    window = min(window, len(taus))
    slope = loglog_slope(1.0 / taus[-window:], js[-window:])
    finite = slope < slope_threshold
    return IndicatorResult(
        float(js[-1]) if finite else math.inf,
        FINITE if finite else INFINITE,
        slope,
        {"taus": taus, "values": js},
    )


def obstacle_traces(data: CauchyData, true_d: BoundaryCurve, v_field=None):
    """(∂w/∂n, v, ∂v/∂n) on the obstacle boundary, normal out of the obstacle."""
    sol = data.solution
    if sol is None:
        raise ParameterError("data carry no forward solution to read obstacle traces from")
    if hasattr(sol, "dr_u"):
        c = true_d.nodes
        r = np.hypot(c[:, 0], c[:, 1])
        th = np.arctan2(c[:, 1], c[:, 0])
        dnu_u = sol.dr_u(r, th)
        v_vals, dnu_v = sol.v(c), sol.dr_v(r, th)
    else:
        dnu_u = sol.dnu_u_obstacle()
        v_vals, dnu_v = sol.v_on_obstacle(), sol.dnu_v_obstacle()
    if v_field is not None:
        v_vals = v_field(true_d.nodes)
        dnu_v = np.sum(v_field.gradient(true_d.nodes) * true_d.normals, axis=1)
    return dnu_u - dnu_v, v_vals, dnu_v


def green_identity_check(data: CauchyData, true_d: BoundaryCurve, phi, v_field=None) -> float:
    """Relative mismatch between the obstacle-side and outer-side forms of
    ∫ W[φ] ∂w/∂n, where W is the free-space double layer with density φ on
    the outer boundary."""
    phi = np.asarray(phi, dtype=np.float64)
    omega = data.omega
    dnu_w_d, v_d, _ = obstacle_traces(data, true_d, v_field)
    w_on_d = assemble_W(omega, true_d).matrix @ phi
    dn_w_on_d = layers.double_layer_dn(true_d.nodes, true_d.normals, omega) @ phi
    inner = float(np.dot(true_d.weights, w_on_d * dnu_w_d + dn_w_on_d * v_d))
    w_trace = assemble_W(omega).matrix @ phi
    outer = float(np.dot(omega.weights, w_trace * data.dnu_w))
    scale = max(abs(inner), abs(outer))
    return 0.0 if scale == 0.0 else abs(inner - outer) / scale


def taylor_growth_diagnostic(data: CauchyData, z, h=None, rho=0.1, ell_max=ELL_MAX, n_directions=32):
    """a_ℓ = ρ^ℓ |(h·∇)^ℓ w(z)| / ℓ! for ℓ = 0..ell_max, maximized over
    ``n_directions`` equally spaced h when ``h`` is None."""
    if int(ell_max) != ell_max or ell_max > ELL_MAX or ell_max < 0:
        raise ParameterError(f"ell_max must be an integer in [0, {ELL_MAX}]")
    z = np.asarray(z, dtype=np.float64).reshape(2)
    om = data.omega
    c = np.asarray(om.spec["center"])
    if om.spec["radius"] - np.hypot(*(z - c)) <= rho:
        raise ParameterError("need dist(z, outer boundary) > rho")
    if h is None:
        ang = 2.0 * np.pi * np.arange(n_directions) / n_directions
        hs = np.exp(1j * ang)
    else:
        h = np.asarray(h, dtype=np.float64)
        hs = np.array([complex(h[0], h[1]) / np.hypot(*h)])
    out = np.empty(int(ell_max) + 1)
    for ell in range(int(ell_max) + 1):
        d = laurent_derivative(data, z, ell)[0]
        vals = np.abs(np.real(hs**ell * d))
        out[ell] = rho**ell * float(vals.max()) / math.factorial(ell)
    return out
