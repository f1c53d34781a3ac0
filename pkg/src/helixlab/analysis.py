"""Classification of curve/field pairs and numerical theorem verification.

Implements the along-curve definitions (eikonal, affine, slant helix, normed
and non-normed Darboux helix, constant precession) as measured-constancy
checks over an arc-length grid, plus verifiers for the structural results
tying them together. Verifiers never throw on failed hypotheses: they report
hypothesis flags and mark the result not-applicable, because the worked
slant-helix fixture itself fails the affinity hypothesis while remaining
classifiable.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateFrame, EmptyGrid, NonFiniteValue, NotSlantHelix
from .frenet import (
    KAPPA_MIN,
    CurvatureProfile,
    frenet_series,
    slant_invariant_series,
)
from .manifold import christoffel_b, gradient_b, hessian_b, inner_b, norm_b

DEFAULT_CONSTANCY_TOL = 1e-6
SAMPLED_CONSTANCY_TOL = 1e-3
DEFAULT_AFFINE_TOL = 1e-6
DEFAULT_THEOREM_TOL = 1e-4
NONZERO_FLOOR = 1e-10
TAU_PRIME_FLOOR = 1e-8
_BASE_STEP = 1e-5

ASSUMPTION_NOTES = (
    "completeness, connectedness, and the N x R product structure of the "
    "ambient manifold are assumed, not verified",
    "verdicts hold on the analyzed arc-length window only",
    "binormal orientation fixed by the chart volume form; the sign of tau "
    "follows that choice",
)


def default_constancy_tol(curve):
    """1e-6 for expression-backed curves, 1e-3 for sampled ones."""
    kind = getattr(getattr(curve, "curve", curve), "kind", "expression")
    return SAMPLED_CONSTANCY_TOL if kind == "sampled" else DEFAULT_CONSTANCY_TOL


# ---------------------------------------------------------------------------
# Constancy


@dataclass(frozen=True)
class ConstancyResult:
    """Measured near-constancy of a scalar sampled over a grid."""

    is_constant: bool
    mean: float
    max_abs_deviation: float
    scale: float
    tolerance: float

    @classmethod
    def from_values(cls, values, tolerance):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise EmptyGrid("constancy check needs at least two values")
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue("constancy check received non-finite values")
        mean = float(values.mean())
        dev = float(np.max(np.abs(values - mean)))
        scale = max(1.0, abs(mean))
        return cls(
            is_constant=dev <= tolerance * scale,
            mean=mean,
            max_abs_deviation=dev,
            scale=scale,
            tolerance=float(tolerance),
        )


def check_constancy(values, tolerance):
    """Mean, max deviation, and verdict dev <= tolerance * max(1, |mean|)."""
    return ConstancyResult.from_values(values, tolerance)


# ---------------------------------------------------------------------------
# Shared per-pair computation


class PairContext:
    """Everything the classifiers need, computed once per (curve, field, grid).

    The Frenet series is built lazily: eikonal/affinity checks work on curves
    whose frame is degenerate (straight segments), where only the gradient
    along the curve is needed.
    """

    def __init__(self, field_f, curve, metric, grid):
        self.field = field_f
        self.curve = curve
        self.metric = metric
        self.grid = np.atleast_1d(np.asarray(grid, dtype=float))
        if self.grid.size < 2:
            raise EmptyGrid("analysis grid needs at least two points")
        self.points = curve.eval_batch(self.grid)
        self.g = metric.eval_batch(self.points)
        self.grad = gradient_b(field_f, metric, self.points)
        self._series = None

    @property
    def series(self):
        if self._series is None:
            self._series = frenet_series(self.curve, self.metric, self.grid)
        return self._series

    @property
    def grad_norms(self):
        return norm_b(self.g, self.grad)

    @property
    def cos_theta_series(self):
        return inner_b(self.g, self.grad, self.series.N)

    @property
    def n_series(self):
        return inner_b(self.g, self.grad, self.series.W0)

    @property
    def gw_series(self):
        return inner_b(self.g, self.grad, self.series.W)

    @property
    def frenet_components(self):
        return np.stack(
            [
                inner_b(self.g, self.grad, self.series.T),
                self.cos_theta_series,
                inner_b(self.g, self.grad, self.series.B),
            ],
            axis=1,
        )

    def profile(self):
        return CurvatureProfile.from_series(self.series)


def covariant_derivative_field_b(curve, metric, vector_fn, grid, step=None):
    """Batched nabla_T V over a grid for a vector field V(s) along the curve.

    ``vector_fn`` maps an (n,) array of arc lengths to (n, 3) ambient
    components. Differentiation uses the same second-order stencil as the
    Frenet machinery (one-sided at domain ends).
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if step is None:
        delta = _BASE_STEP * np.maximum(1.0, np.abs(grid))
        spacing = getattr(getattr(curve, "curve", None), "sample_spacing", None)
        if spacing is not None:
            delta = np.maximum(delta, 2.0 * spacing)
    else:
        delta = np.full_like(grid, float(step))
    s_lo, s_hi = curve.domain
    left = grid - delta < s_lo
    right = grid + delta > s_hi
    center = ~(left | right)
    sh1 = np.where(center, grid - delta, np.where(left, grid + delta, grid - delta))
    sh2 = np.where(
        center, grid + delta, np.where(left, grid + 2 * delta, grid - 2 * delta)
    )
    inv = 1.0 / (2.0 * delta)
    c0 = np.where(center, 0.0, np.where(left, -3.0, 3.0)) * inv
    c1 = np.where(center, -1.0, np.where(left, 4.0, -4.0)) * inv
    c2 = np.where(center, 1.0, np.where(left, -1.0, 1.0)) * inv

    v0 = vector_fn(grid)
    v1 = vector_fn(sh1)
    v2 = vector_fn(sh2)
    dv = c0[:, None] * v0 + c1[:, None] * v1 + c2[:, None] * v2
    if metric.is_constant:
        return dv
    pos, d1, _ = curve.jets_batch(grid)
    gam = christoffel_b(metric, pos)
    return dv + np.einsum("nkij,ni,nj->nk", gam, d1, v0)


# ---------------------------------------------------------------------------
# Definition classifiers


@dataclass(frozen=True)
class EikonalResult:
    constancy: ConstancyResult
    zero_gradient: bool

    @property
    def is_eikonal(self):
        return self.constancy.is_constant


def _eikonal(ctx, tol):
    c = check_constancy(ctx.grad_norms, tol)
    return EikonalResult(constancy=c, zero_gradient=abs(c.mean) <= NONZERO_FLOOR)


def is_eikonal_along(field_f, curve, metric, grid, tol=None):
    """Constancy of s -> |grad f|_g along the curve."""
    tol = tol if tol is not None else default_constancy_tol(curve)
    return _eikonal(PairContext(field_f, curve, metric, grid), tol)


@dataclass(frozen=True)
class AffinityResult:
    is_affine: bool
    max_residual: float
    tolerance: float
    max_hessian_norm: Optional[float] = None


def _affine(ctx, tol, include_hessian=False):
    def grad_at(s):
        return gradient_b(ctx.field, ctx.metric, ctx.curve.eval_batch(s))

    cov_grad = covariant_derivative_field_b(
        ctx.curve, ctx.metric, grad_at, ctx.grid
    )
    g = ctx.g
    res_norms = norm_b(g, cov_grad)
    max_res = float(np.max(res_norms))
    max_hess = None
    if include_hessian:
        hess = hessian_b(ctx.field, ctx.metric, ctx.points)
        ginv = np.linalg.inv(g)
        hess_sq = np.einsum("nik,njl,nij,nkl->n", ginv, ginv, hess, hess)
        max_hess = float(np.sqrt(np.max(np.abs(hess_sq))))
    return AffinityResult(
        is_affine=max_res < tol,
        max_residual=max_res,
        tolerance=float(tol),
        max_hessian_norm=max_hess,
    )


def is_affine_along(field_f, curve, metric, grid, tol=DEFAULT_AFFINE_TOL,
                    include_hessian=False):
    """Max |nabla_T grad f|_g over the grid; affine iff below tol.

    Optionally reports the g-Frobenius norm of the covariant Hessian at the
    curve points (the vanishing-Hessian characterization of affinity).
    """
    return _affine(PairContext(field_f, curve, metric, grid), tol, include_hessian)


@dataclass(frozen=True)
class SlantHelixResult:
    is_slant_helix: bool
    cos_theta: ConstancyResult
    eikonal: EikonalResult
    zero_constant: bool  # g(grad f, N) constant but below the nonzero floor


def _slant(ctx, tol):
    eik = _eikonal(ctx, tol)
    cos = check_constancy(ctx.cos_theta_series, tol)
    # a constant below its own measurement scatter counts as the zero constant
    zero = abs(cos.mean) <= max(NONZERO_FLOOR, cos.max_abs_deviation)
    verdict = (
        cos.is_constant and not zero and eik.is_eikonal and not eik.zero_gradient
    )
    return SlantHelixResult(
        is_slant_helix=verdict, cos_theta=cos, eikonal=eik, zero_constant=zero
    )


def classify_slant_helix(field_f, curve, metric, grid, tol=None):
    """f-eikonal slant helix: |grad f| and g(grad f, N) constant, the latter
    nonzero."""
    tol = tol if tol is not None else default_constancy_tol(curve)
    return _slant(PairContext(field_f, curve, metric, grid), tol)


@dataclass(frozen=True)
class DarbouxHelixResult:
    is_darboux_helix: bool
    value: ConstancyResult  # g(grad f, W0) or g(grad f, W)
    eikonal: EikonalResult
    normed: bool


def _darboux(ctx, tol, normed=True):
    series = ctx.n_series if normed else ctx.gw_series
    eik = _eikonal(ctx, tol)
    val = check_constancy(series, tol)
    verdict = val.is_constant and eik.is_eikonal and not eik.zero_gradient
    return DarbouxHelixResult(
        is_darboux_helix=verdict, value=val, eikonal=eik, normed=normed
    )


def classify_darboux_helix(field_f, curve, metric, grid, tol=None):
    """f-eikonal Darboux helix: g(grad f, W0) constant along the curve."""
    tol = tol if tol is not None else default_constancy_tol(curve)
    return _darboux(PairContext(field_f, curve, metric, grid), tol, normed=True)


def classify_non_normed_darboux(field_f, curve, metric, grid, tol=None):
    """Non-normed variant: g(grad f, W) constant along the curve."""
    tol = tol if tol is not None else default_constancy_tol(curve)
    return _darboux(PairContext(field_f, curve, metric, grid), tol, normed=False)


@dataclass(frozen=True)
class PrecessionResult:
    is_constant_precession: bool
    w: float
    mu: float
    kappa2_plus_tau2: ConstancyResult
    phase_max_deviation: float
    degenerate: bool  # fitted |mu| ~ 0: a general helix in precession clothing
    tolerance: float


def check_constant_precession(profile, tol=DEFAULT_CONSTANCY_TOL):
    """Fit kappa = w sin(mu s + phase0), tau = w cos(mu s + phase0).

    True iff kappa^2 + tau^2 is constant (w^2) and the unwrapped phase
    atan2(kappa, tau) is affine in s. A fitted slope of ~0 is reported as
    degenerate (constant kappa, tau: a general helix).
    """
    if len(profile) < 32:
        raise EmptyGrid(
            f"precession check needs >= 32 grid points, got {len(profile)}"
        )
    k2t2 = check_constancy(profile.kappa2_plus_tau2, tol)
    w = float(np.sqrt(max(k2t2.mean, 0.0)))
    phase = np.unwrap(np.arctan2(profile.kappa, profile.tau))
    slope, intercept = np.polyfit(profile.s, phase, 1)
    fit = slope * profile.s + intercept
    resid = float(np.max(np.abs(phase - fit)))
    phase_scale = max(1.0, float(np.max(np.abs(phase))))
    affine_phase = resid <= tol * phase_scale
    return PrecessionResult(
        is_constant_precession=k2t2.is_constant and affine_phase,
        w=w,
        mu=float(slope),
        kappa2_plus_tau2=k2t2,
        phase_max_deviation=resid,
        degenerate=abs(slope) <= 1e-10,
        tolerance=float(tol),
    )


# ---------------------------------------------------------------------------
# Axis reconstruction (slant-helix axis formula)


@dataclass(frozen=True)
class AxisField:
    """Candidate axis samples in Frenet and ambient components."""

    s: np.ndarray
    components: np.ndarray  # (n, 3): (a1, a2, a3) in the Frenet frame
    ambient: np.ndarray  # (n, 3) chart components
    n_value: float
    cos_theta: float
    max_gradient_deviation: float
    ambient_deviation: Optional[float]  # constant-metric charts only


def _reconstruct_axis(ctx, slant_result):
    if not slant_result.is_slant_helix:
        raise NotSlantHelix(
            "axis reconstruction requires a positive slant-helix verdict"
        )
    series = ctx.series
    nu = np.sqrt(series.kappa**2 + series.tau**2)
    n_val = float(np.mean(ctx.n_series))
    cos_theta = slant_result.cos_theta.mean
    comps = np.stack(
        [n_val * series.tau / nu, np.full_like(nu, cos_theta), n_val * series.kappa / nu],
        axis=1,
    )
    ambient = (
        comps[:, 0:1] * series.T + comps[:, 1:2] * series.N + comps[:, 2:3] * series.B
    )
    grad_dev = float(np.max(norm_b(ctx.g, ambient - ctx.grad)))
    ambient_dev = None
    if ctx.metric.is_constant:
        mean_axis = ambient.mean(axis=0)
        ambient_dev = float(
            np.max(norm_b(ctx.g, ambient - mean_axis[None, :]))
        )
    return AxisField(
        s=ctx.grid,
        components=comps,
        ambient=ambient,
        n_value=n_val,
        cos_theta=cos_theta,
        max_gradient_deviation=grad_dev,
        ambient_deviation=ambient_dev,
    )


def reconstruct_axis(field_f, curve, metric, grid, tol=None):
    """Axis A(s) = (n tau/nu) T + cos(theta) N + (n kappa/nu) B with measured
    n and cos(theta); reports the deviation from grad f along the curve."""
    tol = tol if tol is not None else default_constancy_tol(curve)
    ctx = PairContext(field_f, curve, metric, grid)
    return _reconstruct_axis(ctx, _slant(ctx, tol))


# ---------------------------------------------------------------------------
# System (16) and Eq. (19) helpers


def system_16_residuals(s, kappa, tau, components):
    """Residuals of the parallel-transport system in Frenet components:
    a1' - a2 kappa, a1 kappa + a2' - a3 tau, a3' + a2 tau."""
    a1, a2, a3 = components[:, 0], components[:, 1], components[:, 2]
    d1 = np.gradient(a1, s, edge_order=2)
    d2 = np.gradient(a2, s, edge_order=2)
    d3 = np.gradient(a3, s, edge_order=2)
    return (
        d1 - a2 * kappa,
        a1 * kappa + d2 - a3 * tau,
        d3 + a2 * tau,
    )


def eq_19_residuals(s, kappa, tau, components, tau_prime_floor=TAU_PRIME_FLOOR):
    """Residual a2' - a3 (kappa^2+tau^2)'/(2 tau') where |tau'| is above the
    floor; returns (residuals, mask)."""
    a2, a3 = components[:, 1], components[:, 2]
    d_a2 = np.gradient(a2, s, edge_order=2)
    d_k2t2 = np.gradient(kappa**2 + tau**2, s, edge_order=2)
    d_tau = np.gradient(tau, s, edge_order=2)
    mask = np.abs(d_tau) > tau_prime_floor
    resid = np.zeros_like(s)
    resid[mask] = d_a2[mask] - a3[mask] * d_k2t2[mask] / (2.0 * d_tau[mask])
    return resid, mask


# ---------------------------------------------------------------------------
# Theorem and corollary verifiers


@dataclass(frozen=True)
class Theorem21Report:
    """Slant-invariant constancy and axis reconstruction under affinity."""

    affine: AffinityResult
    slant: SlantHelixResult
    hypotheses_met: bool
    invariant: ConstancyResult
    axis: Optional[AxisField]
    tolerance: float
    applicable: bool
    passed: Optional[bool]
    notes: tuple = ()


def verify_theorem_2_1(field_f, curve, metric, grid, tol=DEFAULT_THEOREM_TOL,
                       constancy_tol=None, affine_tol=DEFAULT_AFFINE_TOL):
    ctx = PairContext(field_f, curve, metric, grid)
    constancy_tol = (
        constancy_tol if constancy_tol is not None else default_constancy_tol(curve)
    )
    affine = _affine(ctx, affine_tol)
    slant = _slant(ctx, constancy_tol)
    hypo = affine.is_affine and slant.is_slant_helix
    invariant = check_constancy(slant_invariant_series(ctx.profile()), tol)
    axis = None
    notes = []
    if slant.is_slant_helix:
        axis = _reconstruct_axis(ctx, slant)
    else:
        notes.append("axis reconstruction skipped: not a slant helix")
    if not affine.is_affine:
        notes.append(
            f"affinity hypothesis fails (max residual "
            f"{affine.max_residual:.6g}); conclusions reported, not asserted"
        )
    applicable = hypo
    passed = None
    if applicable:
        ok_axis = axis is not None and axis.max_gradient_deviation < tol
        passed = invariant.is_constant and ok_axis
    return Theorem21Report(
        affine=affine,
        slant=slant,
        hypotheses_met=hypo,
        invariant=invariant,
        axis=axis,
        tolerance=float(tol),
        applicable=applicable,
        passed=passed,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class Corollary22Report:
    """Residuals of the nonlinear curvature system of the slant-helix axis."""

    residual_tangential: float
    residual_binormal: float
    mu_argument: float
    n_value: float
    tolerance: float
    passed: bool


def verify_corollary_2_2(profile, n, mu, tol=DEFAULT_THEOREM_TOL):
    """Max residuals of (n tau/nu)' - mu kappa and (n kappa/nu)' + mu tau.

    ``mu`` here is the constant of the equation system; the proof's transport
    system forces mu = cos(theta), and that binding is what the callers pass.
    """
    kappa, tau, s = profile.kappa, profile.tau, profile.s
    if np.any(kappa <= KAPPA_MIN):
        i = int(np.argmax(kappa <= KAPPA_MIN))
        raise DegenerateFrame(
            f"kappa = {kappa[i]:.3g} at s = {s[i]:.6g} below the frame floor"
        )
    nu = np.sqrt(kappa**2 + tau**2)
    r1 = np.gradient(n * tau / nu, s, edge_order=2) - mu * kappa
    r2 = np.gradient(n * kappa / nu, s, edge_order=2) + mu * tau
    res1 = float(np.max(np.abs(r1)))
    res2 = float(np.max(np.abs(r2)))
    return Corollary22Report(
        residual_tangential=res1,
        residual_binormal=res2,
        mu_argument=float(mu),
        n_value=float(n),
        tolerance=float(tol),
        passed=res1 < tol and res2 < tol,
    )


@dataclass(frozen=True)
class Theorem22Report:
    """Slant helix => Darboux helix, with the plane decomposition residual."""

    affine: AffinityResult
    slant: SlantHelixResult
    darboux: DarbouxHelixResult
    decomposition_residual: float
    tolerance: float
    applicable: bool
    implication_holds: Optional[bool]
    passed: Optional[bool]


def verify_theorem_2_2(field_f, curve, metric, grid, tol=DEFAULT_THEOREM_TOL,
                       constancy_tol=None, affine_tol=DEFAULT_AFFINE_TOL):
    ctx = PairContext(field_f, curve, metric, grid)
    constancy_tol = (
        constancy_tol if constancy_tol is not None else default_constancy_tol(curve)
    )
    affine = _affine(ctx, affine_tol)
    slant = _slant(ctx, constancy_tol)
    darboux_res = _darboux(ctx, constancy_tol, normed=True)
    n_val = float(np.mean(ctx.n_series))
    cos_theta = slant.cos_theta.mean
    recon = n_val * ctx.series.W0 + cos_theta * ctx.series.N
    resid = float(np.max(norm_b(ctx.g, ctx.grad - recon)))
    applicable = slant.is_slant_helix
    implication = darboux_res.is_darboux_helix if applicable else None
    passed = (implication and resid < tol) if applicable else None
    return Theorem22Report(
        affine=affine,
        slant=slant,
        darboux=darboux_res,
        decomposition_residual=resid,
        tolerance=float(tol),
        applicable=applicable,
        implication_holds=implication,
        passed=passed,
    )


@dataclass(frozen=True)
class Theorem23Report:
    """Slant helix <=> kappa^2 + tau^2 constant, under the non-normed
    Darboux hypothesis, plus the Eq.-(19)-style transport residual."""

    affine: AffinityResult
    non_normed: DarbouxHelixResult
    slant: SlantHelixResult
    kappa2_plus_tau2: ConstancyResult
    equivalence_holds: bool
    eq19_max_residual: Optional[float]
    eq19_points: int
    tolerance: float
    applicable: bool
    passed: Optional[bool]


def verify_theorem_2_3(field_f, curve, metric, grid, tol=DEFAULT_THEOREM_TOL,
                       constancy_tol=None, affine_tol=DEFAULT_AFFINE_TOL):
    ctx = PairContext(field_f, curve, metric, grid)
    constancy_tol = (
        constancy_tol if constancy_tol is not None else default_constancy_tol(curve)
    )
    affine = _affine(ctx, affine_tol)
    non_normed = _darboux(ctx, constancy_tol, normed=False)
    slant = _slant(ctx, constancy_tol)
    k2t2 = check_constancy(ctx.series.kappa2_plus_tau2, constancy_tol)
    agreement = slant.is_slant_helix == k2t2.is_constant
    resid, mask = eq_19_residuals(
        ctx.grid, ctx.series.kappa, ctx.series.tau, ctx.frenet_components
    )
    eq19_max = float(np.max(np.abs(resid[mask]))) if np.any(mask) else None
    applicable = non_normed.is_darboux_helix and affine.is_affine
    passed = None
    if applicable:
        passed = agreement and (eq19_max is None or eq19_max < tol)
    return Theorem23Report(
        affine=affine,
        non_normed=non_normed,
        slant=slant,
        kappa2_plus_tau2=k2t2,
        equivalence_holds=agreement,
        eq19_max_residual=eq19_max,
        eq19_points=int(np.sum(mask)),
        tolerance=float(tol),
        applicable=applicable,
        passed=passed,
    )


@dataclass(frozen=True)
class GatedCheck:
    """A raw residual check wrapped with the hypotheses that license it."""

    hypotheses_met: bool
    affine: AffinityResult
    slant_helix: bool
    result: object
    applicable: bool
    passed: Optional[bool]


@dataclass(frozen=True)
class CorollariesReport:
    """Cross-equivalences: slant <=> constant precession (2.3), slant <=>
    Darboux (2.4), and non-normed + kappa^2+tau^2 constant <=> Darboux (2.1)."""

    non_normed: DarbouxHelixResult
    slant: SlantHelixResult
    darboux: DarbouxHelixResult
    precession: PrecessionResult
    kappa2_plus_tau2: ConstancyResult
    cor_2_1_agrees: bool
    cor_2_3_agrees: bool
    cor_2_4_agrees: bool
    applicable: bool
    passed: Optional[bool]


def verify_corollaries_2_3_2_4(field_f, curve, metric, grid,
                               constancy_tol=None):
    ctx = PairContext(field_f, curve, metric, grid)
    constancy_tol = (
        constancy_tol if constancy_tol is not None else default_constancy_tol(curve)
    )
    non_normed = _darboux(ctx, constancy_tol, normed=False)
    slant = _slant(ctx, constancy_tol)
    darboux_res = _darboux(ctx, constancy_tol, normed=True)
    precession = check_constant_precession(ctx.profile(), constancy_tol)
    k2t2 = precession.kappa2_plus_tau2
    cor23 = slant.is_slant_helix == precession.is_constant_precession
    cor24 = slant.is_slant_helix == darboux_res.is_darboux_helix
    cor21 = darboux_res.is_darboux_helix == (
        non_normed.is_darboux_helix and k2t2.is_constant
    )
    applicable = non_normed.is_darboux_helix
    passed = (cor21 and cor23 and cor24) if applicable else None
    return CorollariesReport(
        non_normed=non_normed,
        slant=slant,
        darboux=darboux_res,
        precession=precession,
        kappa2_plus_tau2=k2t2,
        cor_2_1_agrees=cor21,
        cor_2_3_agrees=cor23,
        cor_2_4_agrees=cor24,
        applicable=applicable,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Composite classification


@dataclass(frozen=True)
class ClassificationReport:
    """All five definition verdicts with their measured constants."""

    eikonal: EikonalResult
    affine: AffinityResult
    slant: SlantHelixResult
    darboux: DarbouxHelixResult
    non_normed: DarbouxHelixResult
    precession: PrecessionResult
    grad_norm: ConstancyResult
    cos_theta: ConstancyResult
    n_value: ConstancyResult
    g_w: ConstancyResult
    kappa2_plus_tau2: ConstancyResult
    axis: Optional[AxisField]
    constancy_tolerance: float
    affine_tolerance: float
    assumption_notes: tuple = field(default=ASSUMPTION_NOTES)


def classify_pair(field_f, curve, metric, grid, tol=None,
                  affine_tol=DEFAULT_AFFINE_TOL, include_hessian=True):
    """Run every classifier over one shared Frenet series."""
    tol = tol if tol is not None else default_constancy_tol(curve)
    ctx = PairContext(field_f, curve, metric, grid)
    eik = _eikonal(ctx, tol)
    aff = _affine(ctx, affine_tol, include_hessian=include_hessian)
    slant = _slant(ctx, tol)
    darboux_res = _darboux(ctx, tol, normed=True)
    non_normed = _darboux(ctx, tol, normed=False)
    precession = check_constant_precession(ctx.profile(), tol)
    axis = _reconstruct_axis(ctx, slant) if slant.is_slant_helix else None
    return ClassificationReport(
        eikonal=eik,
        affine=aff,
        slant=slant,
        darboux=darboux_res,
        non_normed=non_normed,
        precession=precession,
        grad_norm=eik.constancy,
        cos_theta=slant.cos_theta,
        n_value=check_constancy(ctx.n_series, tol),
        g_w=check_constancy(ctx.gw_series, tol),
        kappa2_plus_tau2=check_constancy(ctx.series.kappa2_plus_tau2, tol),
        axis=axis,
        constancy_tolerance=float(tol),
        affine_tolerance=float(affine_tol),
    )
