"""Synthesis of test curves and fields.

Curve generation integrates the flat-space Frenet system (alpha' = T,
T' = kappa N, N' = -kappa T + tau B, B' = -tau N) with classical RK4 and a
modified Gram-Schmidt re-orthonormalization after every step. Generation is
Euclidean-only; general-metric synthesis would need geodesic machinery that
is out of scope.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import make_interp_spline

from . import backend
from .curves import ParamCurve, UnitSpeedCurve, unit_speed_from_param
from .errors import (
    AxisFitFailed,
    InvalidProfile,
    NonOrthonormalInitialFrame,
    NonPositiveW,
    StepTooLarge,
)
from .expr import Expr, parse
from .frenet import FrenetSeries, frenet_series
from .manifold import MetricField, ScalarField, as_vector

DRIFT_TOL = 1e-6
FRAME_ORTHO_TOL = 1e-9
MAX_STEPS = 10**7
DEFAULT_STEPS = 8192


@dataclass
class FrameState:
    """ODE state for the frame integrator: position plus (T, N, B)."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    T: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    N: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))
    B: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        self.position = as_vector(self.position, "position")
        self.T = as_vector(self.T, "T")
        self.N = as_vector(self.N, "N")
        self.B = as_vector(self.B, "B")
        frame = np.array([self.T, self.N, self.B])
        dev = np.max(np.abs(frame @ frame.T - np.eye(3)))
        if dev > FRAME_ORTHO_TOL:
            raise NonOrthonormalInitialFrame(
                f"initial frame deviates from orthonormality by {dev:.3g}"
            )

    def as_matrix(self):
        return np.array([self.position, self.T, self.N, self.B])


class ProfileSpec:
    """Curvature/torsion laws kappa(s), tau(s) on [0, length] with step h.

    ``allow_signed`` admits laws whose kappa crosses zero (the constant
    precession family on windows longer than one arch); frames measured near
    those crossings still fail with DegenerateFrame downstream.
    """

    def __init__(self, kappa, tau, length, step=None, constants=None,
                 allow_signed=False):
        self.length = float(length)
        if not (np.isfinite(self.length) and self.length > 0):
            raise InvalidProfile(f"bad profile length {length}")
        self.step = float(step) if step is not None else self.length / DEFAULT_STEPS
        if self.step <= 0:
            raise InvalidProfile("step must be positive")
        if self.length / self.step > MAX_STEPS:
            raise InvalidProfile(
                f"{self.length / self.step:.3g} steps exceed the {MAX_STEPS:.0g} guard"
            )
        self.allow_signed = bool(allow_signed)
        self._kappa = self._as_evaluator(kappa, constants)
        self._tau = self._as_evaluator(tau, constants)

    @staticmethod
    def _as_evaluator(source, constants):
        if callable(source) and not isinstance(source, (str, Expr)):
            return lambda s: np.asarray(source(s), dtype=float)
        expr = source if isinstance(source, Expr) else parse(source, constants=constants)
        extra = expr.free_variables - {"s"}
        if extra:
            raise InvalidProfile(f"profile expression uses variables {extra}, only s")
        prog = expr.program(("s",))
        return lambda s: backend.eval_values(prog, np.asarray(s, dtype=float)[:, None])

    def eval_batch(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        kappa = self._kappa(s)
        tau = self._tau(s)
        if self.allow_signed:
            return kappa, tau
        if np.any(kappa < -1e-12):
            i = int(np.argmax(kappa < -1e-12))
            raise InvalidProfile(
                f"kappa(s) = {kappa[i]:.3g} < 0 at s = {s[i]:.6g}"
            )
        return np.clip(kappa, 0.0, None), tau


def constant_precession_profile(w, mu, length=None, step=None):
    """kappa = w sin(mu s), tau = w cos(mu s): the constant-precession laws.

    The default length is the largest window with kappa >= 0, i.e. pi/|mu|
    (a full half-wave); mu = 0 degenerates to kappa = 0 and is rejected
    downstream when a frame is requested.
    """
    if w <= 0:
        raise NonPositiveW(f"w must be positive, got {w}")
    if length is None:
        length = np.pi / abs(mu) if mu != 0 else 10.0
    return ProfileSpec(
        "w * sin(mu * s)",
        "w * cos(mu * s)",
        length,
        step=step,
        constants={"w": float(w), "mu": float(mu)},
        allow_signed=True,
    )


def integrate_frenet(profile, initial=None, drift_tol=DRIFT_TOL):
    """Integrate a curvature/torsion profile into a unit-speed curve.

    Returns a UnitSpeedCurve (quintic spline through the integrated samples)
    whose ``frames`` attribute holds the stored per-step frames and whose
    ``frame_drift`` holds the pre-orthonormalization drift history.
    """
    initial = initial if initial is not None else FrameState()
    n_steps = max(2, int(round(profile.length / profile.step)))
    h = profile.length / n_steps
    stages = np.linspace(0.0, profile.length, 2 * n_steps + 1)
    kappa_st, tau_st = profile.eval_batch(stages)
    pos, tt, nn, bb, drifts, status, step_idx = backend.rk4_frenet(
        kappa_st, tau_st, h, initial.as_matrix(), drift_tol
    )
    if status != 0:
        raise StepTooLarge(
            f"frame drift {drifts[step_idx]:.3g} exceeded {drift_tol:.1g} at "
            f"step {step_idx} (s = {step_idx * h:.6g}); reduce the step"
        )
    s_grid = np.linspace(0.0, profile.length, n_steps + 1)
    # interpolate the integrator state directly: differentiating a position
    # spline would trade the stored frame accuracy for h^2-scale noise
    pos_spline = make_interp_spline(s_grid, pos, k=5)
    d1_spline = make_interp_spline(s_grid, tt, k=5)
    d2_spline = make_interp_spline(s_grid, kappa_st[::2, None] * nn, k=5)
    curve = ParamCurve.from_callables(
        lambda ts: pos_spline(ts),
        lambda ts: d1_spline(ts),
        lambda ts: d2_spline(ts),
        domain=(0.0, profile.length),
        kind="sampled",
    )
    curve.sample_spacing = h
    unit = unit_speed_from_param(curve, MetricField.euclidean(), profile.length)
    unit.frames = FrenetSeries(
        s_grid, tt, nn, bb, kappa_st[::2], tau_st[::2]
    )
    unit.frame_drift = drifts
    return unit


@dataclass
class TransportResult:
    """Parallel-transported vector field along a curve."""

    s: np.ndarray
    vectors: np.ndarray  # (n, 3) ambient components
    components: Optional[np.ndarray]  # (n, 3) Frenet components (a1, a2, a3)

    def as_callable(self):
        """Interpolant suitable for covariant_derivative_along."""
        k = 5 if len(self.s) >= 6 else 3
        spline = make_interp_spline(self.s, self.vectors, k=k)
        return lambda s: spline(s)


def parallel_transport(curve, metric, v0, grid, substeps=4, components=True):
    """Solve nabla_T V = 0 along the curve over a uniform arc-length grid.

    The component ODE dV^k/ds = -Gamma^k_ij T^i V^j is integrated with RK4
    (``substeps`` per grid interval). Frenet components (a1, a2, a3) are
    reported per grid point when ``components`` is set, which requires
    kappa > kappa_min on the grid.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("transport grid needs at least two points")
    spacing = np.diff(grid)
    if np.max(np.abs(spacing - spacing[0])) > 1e-9 * max(1.0, abs(spacing[0])):
        raise ValueError("transport grid must be uniform")
    v0 = as_vector(v0, "initial vector")
    n_fine = (grid.size - 1) * substeps
    h = (grid[-1] - grid[0]) / n_fine
    stages = np.linspace(grid[0], grid[-1], 2 * n_fine + 1)
    if metric.is_constant:
        mats = np.zeros((stages.size, 3, 3))
    else:
        pos, d1, _ = curve.jets_batch(stages)
        from .manifold import christoffel_b

        gam = christoffel_b(metric, pos)
        mats = -np.einsum("nkij,ni->nkj", gam, d1)
    fine = backend.rk4_linear3(mats, v0, h)
    vectors = fine[::substeps]
    comps = None
    if components:
        series = frenet_series(curve, metric, grid)
        g = metric.eval_batch(curve.eval_batch(grid))
        from .manifold import inner_b

        comps = np.stack(
            [
                inner_b(g, vectors, series.T),
                inner_b(g, vectors, series.N),
                inner_b(g, vectors, series.B),
            ],
            axis=1,
        )
    return TransportResult(s=grid, vectors=vectors, components=comps)


def example_2_1(domain=None):
    """The worked slant-helix pair: f = x + y^2 + z^2 along the unit-speed
    circular helix (s/sqrt2, cos(s/sqrt2), sin(s/sqrt2)) in Euclidean R^3."""
    if domain is None:
        domain = (0.0, 4.0 * np.pi * np.sqrt(2.0))
    from .curves import arclength_reparametrize

    metric = MetricField.euclidean()
    curve = ParamCurve.from_expressions(
        "t/sqrt(2)", "cos(t/sqrt(2))", "sin(t/sqrt(2))", domain
    )
    unit = arclength_reparametrize(curve, metric)
    field_f = ScalarField.from_expression("x + y^2 + z^2")
    return unit, field_f, metric


@dataclass
class PrecessionFixture:
    """Constant-precession curve with its derived linear eikonal field."""

    curve: UnitSpeedCurve
    field: ScalarField
    metric: MetricField
    axis: np.ndarray
    fit_residual: float
    window: tuple
    grid: np.ndarray
    w: float
    mu: float
    n_expected: float
    cos_theta_expected: float

    def __iter__(self):  # unpacks like the (curve, field, metric) triple
        return iter((self.curve, self.field, self.metric))


def precession_fixture(w, mu, step=None, grid_count=2048, phase_margin=0.2,
                       fit_tol=1e-3):
    """Build the end-to-end constant-precession fixture.

    The curve is integrated from Def-1.1-style laws; the field is the linear
    function of the fixed axis D recovered by a least-squares constant fit
    (here: the mean) of A(s) = n W0(s) + cos(theta) N(s), with
    n = w/sqrt(w^2+mu^2) and cos(theta) = -mu/sqrt(w^2+mu^2) from the frame
    transport system. The fit residual certifies the integration.
    """
    if w <= 0:
        raise NonPositiveW(f"w must be positive, got {w}")
    if mu == 0:
        raise ValueError("mu must be nonzero for the precession fixture")
    metric = MetricField.euclidean()
    profile = constant_precession_profile(w, mu, step=step)
    unit = integrate_frenet(profile)
    lo = phase_margin / abs(mu)
    hi = (np.pi - phase_margin) / abs(mu)
    grid = np.linspace(lo, hi, grid_count)
    series = frenet_series(unit, metric, grid)
    nu_hat = np.hypot(w, mu)
    n_const = w / nu_hat
    cos_theta = -mu / nu_hat
    axis_samples = n_const * series.W0 + cos_theta * series.N
    mean_axis = axis_samples.mean(axis=0)
    axis = mean_axis / np.linalg.norm(mean_axis)
    residual = float(np.max(np.linalg.norm(axis_samples - axis, axis=1)))
    if residual > fit_tol:
        raise AxisFitFailed(
            f"constant-axis fit residual {residual:.3g} exceeds {fit_tol:.1g}; "
            "integration step is probably too large"
        )
    field_f = ScalarField.linear(axis, name="precession axis field")
    return PrecessionFixture(
        curve=unit,
        field=field_f,
        metric=metric,
        axis=axis,
        fit_residual=residual,
        window=(lo, hi),
        grid=grid,
        w=float(w),
        mu=float(mu),
        n_expected=n_const,
        cos_theta_expected=cos_theta,
    )
