"""Curve representations and arc-length reparametrization against a metric.

ParamCurve wraps either three coordinate expressions in t (exact jets via the
kernel backend), interpolating splines built from samples, or user callables.
UnitSpeedCurve composes a ParamCurve with the monotone arc-length map; its
derivatives use the exact inverse-function formulas t' = 1/speed and
t'' = -speed'/speed^3, so curvature/torsion quality is limited only by the
curve source, not by the interpolated inverse (which only seeds a Newton
polish).
"""

import numpy as np
from scipy.interpolate import PchipInterpolator, make_interp_spline

from . import backend
from .errors import (
    IrregularCurve,
    NonFiniteValue,
    NonMonotoneParameter,
    TooFewSamples,
)
from .expr import Expr, parse
from .manifold import inner_b

SPEED_FLOOR = 1e-10
MIN_SAMPLES = 7

UNIT_SPEED_TOL_ANALYTIC = 1e-8
UNIT_SPEED_TOL_SAMPLED = 1e-4


class ParamCurve:
    """Regular curve t -> R^3 with first and second derivatives."""

    def __init__(self, *, programs=None, fns=None, domain=None, kind="expression"):
        if domain is None:
            raise ValueError("curve domain [t_min, t_max] is required")
        t0, t1 = float(domain[0]), float(domain[1])
        if not (np.isfinite(t0) and np.isfinite(t1) and t1 > t0):
            raise ValueError(f"bad curve domain [{t0}, {t1}]")
        self.domain = (t0, t1)
        self.kind = kind
        self._programs = programs
        self._fns = fns  # (eval, derivative, second_derivative), vectorized

    @classmethod
    def from_expressions(cls, x, y, z, domain, constants=None):
        programs = []
        for comp in (x, y, z):
            expr = comp if isinstance(comp, Expr) else parse(comp, constants=constants)
            extra = expr.free_variables - {"t"}
            if extra:
                raise ValueError(f"curve component uses variables {extra}, only t")
            programs.append(expr.program(("t",)))
        return cls(programs=programs, domain=domain, kind="expression")

    @classmethod
    def from_callables(cls, eval_fn, derivative_fn, second_fn, domain,
                       kind="callable"):
        """Vectorized callables mapping (n,) parameter arrays to (n, 3)."""
        return cls(fns=(eval_fn, derivative_fn, second_fn), domain=domain, kind=kind)

    @property
    def analytic(self):
        return self.kind in ("expression", "callable")

    def jets_batch(self, ts):
        """(positions, first, second) derivatives, each (n, 3)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self._programs is not None:
            pts = ts[:, None]
            seed = np.ones(1)
            cols = [backend.eval_jet2(p, pts, seed) for p in self._programs]
            pos = np.stack([c[0] for c in cols], axis=1)
            d1 = np.stack([c[1] for c in cols], axis=1)
            d2 = np.stack([c[2] for c in cols], axis=1)
        else:
            ev, de, d2e = self._fns
            pos = np.asarray(ev(ts), dtype=float)
            d1 = np.asarray(de(ts), dtype=float)
            d2 = np.asarray(d2e(ts), dtype=float)
        for arr in (pos, d1, d2):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteValue("curve evaluation produced non-finite values")
        return pos, d1, d2

    def eval_batch(self, ts):
        return self.jets_batch(ts)[0]

    def eval(self, t):
        return self.jets_batch(np.array([t]))[0][0]

    def derivative(self, t):
        return self.jets_batch(np.array([t]))[1][0]

    def second_derivative(self, t):
        return self.jets_batch(np.array([t]))[2][0]

    def restricted(self, t0, t1):
        lo, hi = self.domain
        if not (lo <= t0 < t1 <= hi):
            raise ValueError("restriction outside the curve domain")
        return ParamCurve(programs=self._programs, fns=self._fns,
                          domain=(t0, t1), kind=self.kind)

    def transformed(self, rotation, translation=(0.0, 0.0, 0.0)):
        """Rigid motion p -> Q p + b applied exactly (derivatives rotate)."""
        q = np.asarray(rotation, dtype=float)
        b = np.asarray(translation, dtype=float)
        base = self

        def ev(ts):
            return base.jets_batch(ts)[0] @ q.T + b

        def de(ts):
            return base.jets_batch(ts)[1] @ q.T

        def d2e(ts):
            return base.jets_batch(ts)[2] @ q.T

        return ParamCurve(fns=(ev, de, d2e), domain=self.domain,
                          kind="callable" if self.analytic else "sampled")


class SampledCurve:
    """Ordered (t, point) samples with a chosen interpolation order."""

    def __init__(self, t, points, order=3):
        self.t = np.asarray(t, dtype=float)
        self.points = np.asarray(points, dtype=float)
        self.order = int(order)
        if self.t.ndim != 1 or self.points.shape != (self.t.size, 3):
            raise ValueError("need t of shape (n,) and points of shape (n, 3)")
        if self.t.size < MIN_SAMPLES:
            raise TooFewSamples(
                f"need at least {MIN_SAMPLES} samples, got {self.t.size}"
            )
        if np.any(np.diff(self.t) <= 0.0):
            i = int(np.argmax(np.diff(self.t) <= 0.0))
            raise NonMonotoneParameter(
                f"parameter values must strictly increase (t[{i}] = {self.t[i]}, "
                f"t[{i+1}] = {self.t[i+1]})"
            )
        if not (np.all(np.isfinite(self.t)) and np.all(np.isfinite(self.points))):
            raise NonFiniteValue("curve samples contain non-finite values")


def curve_from_samples(samples):
    """Interpolating ParamCurve through a SampledCurve (spline derivatives)."""
    spline = make_interp_spline(samples.t, samples.points, k=samples.order)
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    return ParamCurve.from_callables(
        lambda ts: spline(ts),
        lambda ts: d1(ts),
        lambda ts: d2(ts),
        domain=(samples.t[0], samples.t[-1]),
        kind="sampled",
    )


# ---------------------------------------------------------------------------
# Arc length


def _adaptive_simpson_cumulative(speed, t0, t1, n_knots, tol):
    """Per-interval adaptive Simpson, vectorized across pending intervals.

    Returns (t_knots, cumulative integral at the knots).
    """
    knots = np.linspace(t0, t1, n_knots)
    totals = np.zeros(n_knots - 1)

    lo = knots[:-1].copy()
    hi = knots[1:].copy()
    owner = np.arange(n_knots - 1)
    f_lo = speed(lo)
    f_hi = speed(hi)
    mid = 0.5 * (lo + hi)
    f_mid = speed(mid)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    tolerances = np.maximum(tol * (hi - lo) / (t1 - t0), 1e-300)

    for _ in range(60):
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        f_lm = speed(lm)
        f_rm = speed(rm)
        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi)
        err = left + right - whole
        done = np.abs(err) <= 15.0 * tolerances
        if np.any(done):
            np.add.at(totals, owner[done],
                      (left + right + err / 15.0)[done])
        if np.all(done):
            break
        keep = ~done
        # split the survivors into two pending halves
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        mid_new = np.concatenate([lm[keep], rm[keep]])
        f_lo = np.concatenate([f_lo[keep], f_mid[keep]])
        f_hi = np.concatenate([f_mid[keep], f_hi[keep]])
        f_mid = np.concatenate([f_lm[keep], f_rm[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        tolerances = np.concatenate([tolerances[keep] / 2.0, tolerances[keep] / 2.0])
        mid = mid_new
    else:
        raise IrregularCurve("arc-length quadrature failed to converge")

    return knots, np.concatenate([[0.0], np.cumsum(totals)])


class UnitSpeedCurve:
    """Arc-length parameterized curve s -> p(s) over [0, length]."""

    def __init__(self, curve, metric, t_knots, s_knots, *, identity=False,
                 speed_tol=None):
        self.curve = curve
        self.metric = metric
        self._identity = identity
        self._t_knots = t_knots
        self._s_knots = s_knots
        self.length = float(s_knots[-1])
        self.domain = (0.0, self.length)
        self.frames = None  # set by generate.integrate_frenet
        self._inverse_seed = (
            None if identity else PchipInterpolator(s_knots, t_knots)
        )
        tol = speed_tol if speed_tol is not None else (
            UNIT_SPEED_TOL_ANALYTIC if curve.analytic else UNIT_SPEED_TOL_SAMPLED
        )
        self.speed_tolerance = tol
        grid = np.linspace(0.0, self.length, 257)
        pos, d1, _ = self.jets_batch(grid)
        g = self.metric.eval_batch(pos)
        speeds = np.sqrt(inner_b(g, d1, d1))
        self.max_speed_deviation = float(np.max(np.abs(speeds - 1.0)))
        if self.max_speed_deviation > tol:
            raise IrregularCurve(
                f"reparametrized speed deviates by {self.max_speed_deviation:.3g} "
                f"(tolerance {tol:.1g})"
            )

    # -- parameter maps -------------------------------------------------------

    def _speed_and_dspeed(self, ts):
        pos, d1, d2 = self.curve.jets_batch(ts)
        g = self.metric.eval_batch(pos)
        speed2 = inner_b(g, d1, d1)
        speed = np.sqrt(speed2)
        if self.metric.is_constant:
            dg_term = 0.0
        else:
            dg = self.metric.partials_batch(pos)
            dg_term = np.einsum("nkij,nk,ni,nj->n", dg, d1, d1, d1)
        dspeed = (dg_term + 2.0 * inner_b(g, d2, d1)) / (2.0 * speed)
        return pos, d1, d2, g, speed, dspeed

    def _speed(self, ts):
        pos, d1, _ = self.curve.jets_batch(ts)
        g = self.metric.eval_batch(pos)
        return np.sqrt(inner_b(g, d1, d1))

    def s_of_t(self, ts):
        """Arc length from the start of the domain to parameter t."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self._identity:
            return ts - self.curve.domain[0]
        idx = np.clip(
            np.searchsorted(self._t_knots, ts, side="right") - 1,
            0,
            len(self._t_knots) - 2,
        )
        lo = self._t_knots[idx]
        base = self._s_knots[idx]
        return base + _simpson_2panel(self._speed, lo, ts)

    def t_of_s(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        slack = 1e-9 * max(1.0, self.length)
        if np.any(s < -slack) or np.any(s > self.length + slack):
            raise ValueError(
                f"arc length outside [0, {self.length}]: "
                f"[{s.min()}, {s.max()}]"
            )
        s = np.clip(s, 0.0, self.length)
        t0, t1 = self.curve.domain
        if self._identity:
            return t0 + s
        t = np.clip(self._inverse_seed(s), t0, t1)
        scale = max(1.0, self.length)
        for _ in range(3):
            resid = self.s_of_t(t) - s
            if np.max(np.abs(resid)) <= 1e-12 * scale:
                break
            t = np.clip(t - resid / self._speed(t), t0, t1)
        return t

    # -- evaluation -----------------------------------------------------------

    def jets_batch(self, s):
        """alpha(s), alpha'(s), alpha''(s) via the exact inverse-map chain rule."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        ts = self.t_of_s(s)
        if self._identity:
            # parameter is already arc length; correcting for the residual
            # speed error of an interpolated source would only add noise
            return self.curve.jets_batch(ts)
        pos, d1, d2, g, speed, dspeed = self._speed_and_dspeed(ts)
        tp = 1.0 / speed
        tpp = -dspeed / speed**3
        a1 = d1 * tp[:, None]
        a2 = d2 * (tp**2)[:, None] + d1 * tpp[:, None]
        return pos, a1, a2

    def eval_batch(self, s):
        return self.jets_batch(s)[0]

    def eval(self, s):
        return self.jets_batch(np.array([float(s)]))[0][0]

    def derivative(self, s):
        return self.jets_batch(np.array([float(s)]))[1][0]

    def second_derivative(self, s):
        return self.jets_batch(np.array([float(s)]))[2][0]


def _simpson_2panel(f, lo, hi):
    """Composite 2-panel Simpson of f over [lo, hi], vectorized."""
    width = hi - lo
    nodes = [lo, lo + 0.25 * width, lo + 0.5 * width, lo + 0.75 * width, hi]
    stacked = np.concatenate(nodes)
    vals = f(stacked).reshape(5, -1)
    return width / 12.0 * (
        vals[0] + 4.0 * vals[1] + 2.0 * vals[2] + 4.0 * vals[3] + vals[4]
    )


def arclength_reparametrize(curve, metric, tol=1e-10, n_knots=257):
    """Reparametrize a regular curve by g-arc length.

    s(t) is accumulated with per-interval adaptive Simpson to ``tol``; the
    inverse map is a monotone cubic (PCHIP) seed polished by Newton steps in
    the evaluation paths.
    """
    t0, t1 = curve.domain

    def speed(ts):
        pos, d1, _ = curve.jets_batch(ts)
        g = metric.eval_batch(pos)
        sp = np.sqrt(inner_b(g, d1, d1))
        low = sp < SPEED_FLOOR
        if np.any(low):
            raise IrregularCurve(
                f"curve speed {sp[low][0]:.3g} below {SPEED_FLOOR} "
                f"near t = {ts[np.argmax(low)]}"
            )
        return sp

    n = n_knots
    last_err = None
    while n <= 2**14 + 1:
        t_knots, s_knots = _adaptive_simpson_cumulative(speed, t0, t1, n, tol)
        try:
            return UnitSpeedCurve(curve, metric, t_knots, s_knots)
        except IrregularCurve as exc:
            last_err = exc
            n = 2 * (n - 1) + 1
    raise last_err


def unit_speed_from_param(curve, metric, length=None):
    """Wrap a curve that is already arc-length parameterized (s = t - t0)."""
    t0, t1 = curve.domain
    total = length if length is not None else (t1 - t0)
    knots = np.array([t0, t1])
    return UnitSpeedCurve(curve, metric, knots, np.array([0.0, total]),
                          identity=True)
