"""Metric tensor machinery on a single chart of a 3-manifold.

A chart is an open subset of R^3 carrying a symmetric positive-definite
metric field g_ij(p). Everything downstream (norms, cross products,
gradients, Hessians, covariant derivatives) funnels through MetricField.

Points and vectors are plain float64 arrays of shape (3,); batched variants
take (n, 3) and are the fast path used by the analysis grids.
"""

import numpy as np

from . import backend
from .errors import HelixlabError, NonFiniteValue, SingularMetric
from .expr import Expr, parse

DEFINITENESS_FLOOR = 1e-12
_FD_STEP = 1e-5

_CHART_VARS = ("x", "y", "z")


def as_vector(v, what="vector"):
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{what} must have shape (3,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{what} has a non-finite component: {arr}")
    return arr


def as_points(pts):
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"points must have shape (n, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("point array has non-finite entries")
    return arr


def _check_spd(g, pts, floor):
    """Leading principal minors > 0 and det above the definiteness floor."""
    m1 = g[:, 0, 0]
    m2 = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] ** 2
    m3 = np.linalg.det(g)
    bad = (m1 <= 0.0) | (m2 <= 0.0) | (m3 <= floor)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SingularMetric(
            f"metric not positive definite at {pts[i]} "
            f"(minors {m1[i]:.3g}, {m2[i]:.3g}, {m3[i]:.3g})"
        )
    if not np.all(np.isfinite(g)):
        raise NonFiniteValue("metric evaluation produced non-finite entries")


class MetricField:
    """Chart metric g_ij(p), stored symmetric, positive definite on use.

    Three sources: a constant matrix, six upper-triangle expressions in
    x, y, z (analytic partials), or a raw callable (finite-difference
    partials with step 1e-5*max(1, |p|)).
    """

    def __init__(self, *, constant=None, entry_exprs=None, fn=None, name="custom",
                 floor=DEFINITENESS_FLOOR):
        self.name = name
        self.floor = floor
        self._constant = None
        self._programs = None
        self._fn = fn
        if constant is not None:
            mat = np.asarray(constant, dtype=float)
            if mat.shape != (3, 3) or not np.allclose(mat, mat.T):
                raise ValueError("constant metric must be a symmetric 3x3 matrix")
            self._constant = (mat + mat.T) / 2.0
            _check_spd(self._constant[None], np.zeros((1, 3)), floor)
        elif entry_exprs is not None:
            # upper triangle only; lower mirrored for exact symmetry
            self._programs = {}
            for (i, j), expr in entry_exprs.items():
                if not isinstance(expr, Expr):
                    expr = parse(expr)
                extra = expr.free_variables - set(_CHART_VARS)
                if extra:
                    raise ValueError(
                        f"metric entry g{i+1}{j+1} uses non-chart variables {extra}"
                    )
                self._programs[(i, j)] = expr.program(_CHART_VARS)
        elif fn is None:
            raise ValueError("one of constant, entry_exprs, fn is required")

    # -- constructors --------------------------------------------------------

    @classmethod
    def euclidean(cls):
        return cls(constant=np.eye(3), name="euclidean")

    @classmethod
    def constant(cls, matrix, name="constant"):
        return cls(constant=matrix, name=name)

    @classmethod
    def half_space(cls):
        """Hyperbolic upper half-space: g_ij = delta_ij / z^2 (chart z > 0)."""
        entries = {(i, i): "1/z^2" for i in range(3)}
        return cls(entry_exprs=entries, name="half_space")

    @classmethod
    def from_expressions(cls, entries, constants=None, name="expression"):
        """entries: dict with keys like "g11", "g12"... (upper triangle wins).

        If both g_ij and g_ji are given their sources must match exactly.
        """
        parsed = {}
        for key, source in entries.items():
            if len(key) != 3 or not key.startswith("g"):
                raise ValueError(f"bad metric entry name {key!r}")
            i, j = int(key[1]) - 1, int(key[2]) - 1
            if not (0 <= i < 3 and 0 <= j < 3):
                raise ValueError(f"bad metric entry name {key!r}")
            lo, hi = min(i, j), max(i, j)
            prev = parsed.get((lo, hi))
            if prev is not None and prev.replace(" ", "") != source.replace(" ", ""):
                raise ValueError(
                    f"asymmetric metric: g{lo+1}{hi+1} and g{hi+1}{lo+1} differ"
                )
            parsed[(lo, hi)] = source
        exprs = {
            key: parse(src, constants=constants) for key, src in parsed.items()
        }
        return cls(entry_exprs=exprs, name=name)

    @classmethod
    def from_callable(cls, fn, name="callable"):
        return cls(fn=fn, name=name)

    # -- evaluation -----------------------------------------------------------

    @property
    def is_constant(self):
        if self._constant is not None:
            return True
        if self._programs is not None:
            return all(p.is_constant for p in self._programs.values())
        return False

    def eval_batch(self, pts):
        pts = as_points(pts)
        n = pts.shape[0]
        if self._constant is not None:
            g = np.broadcast_to(self._constant, (n, 3, 3)).copy()
        elif self._programs is not None:
            g = np.zeros((n, 3, 3))
            for (i, j), prog in self._programs.items():
                vals = backend.eval_values(prog, pts)
                g[:, i, j] = vals
                if i != j:
                    g[:, j, i] = vals
        else:
            g = np.empty((n, 3, 3))
            for k, p in enumerate(pts):
                mat = np.asarray(self._fn(p), dtype=float)
                g[k] = (mat + mat.T) / 2.0
        _check_spd(g, pts, self.floor)
        return g

    def eval(self, p):
        return self.eval_batch(as_vector(p, "point")[None])[0]

    def partials_batch(self, pts):
        """d_k g_ij as (n, 3, 3, 3) indexed [point, k, i, j]."""
        pts = as_points(pts)
        n = pts.shape[0]
        dg = np.zeros((n, 3, 3, 3))
        if self._constant is not None:
            return dg
        if self._programs is not None:
            seeds = np.eye(3)
            for (i, j), prog in self._programs.items():
                if prog.is_constant:
                    continue
                _, grads = backend.eval_grad(prog, pts, seeds)
                dg[:, :, i, j] = grads
                if i != j:
                    dg[:, :, j, i] = grads
            return dg
        # finite differences for callable-backed metrics
        for k in range(3):
            h = _FD_STEP * np.maximum(1.0, np.abs(pts[:, k]))
            hi = pts.copy()
            hi[:, k] += h
            lo = pts.copy()
            lo[:, k] -= h
            ghi = np.stack([np.asarray(self._fn(p), dtype=float) for p in hi])
            glo = np.stack([np.asarray(self._fn(p), dtype=float) for p in lo])
            diff = (ghi - glo) / (2.0 * h)[:, None, None]
            dg[:, k] = (diff + np.transpose(diff, (0, 2, 1))) / 2.0
        return dg

    def partials(self, p):
        return self.partials_batch(as_vector(p, "point")[None])[0]


class ScalarField:
    """Scalar field f(p) with first and second chart partials.

    Expression-backed fields get exact forward-mode first partials; second
    partials come from central differences of the analytic first partials
    (step 1e-5), which is plenty for the tolerances that consume Hessians.
    """

    def __init__(self, *, expr=None, fn=None, constants=None, name="field"):
        self.name = name
        self._program = None
        self._fn = fn
        if expr is not None:
            if not isinstance(expr, Expr):
                expr = parse(expr, constants=constants)
            extra = expr.free_variables - set(_CHART_VARS)
            if extra:
                raise ValueError(f"scalar field uses non-chart variables {extra}")
            self.expr = expr
            self._program = expr.program(_CHART_VARS)
        elif fn is None:
            raise ValueError("one of expr, fn is required")

    @classmethod
    def from_expression(cls, source, constants=None, name=None):
        return cls(expr=source, constants=constants,
                   name=name or f"f = {source if isinstance(source, str) else source.source}")

    @classmethod
    def linear(cls, coeffs, name="linear"):
        """f(p) = <coeffs, p> in chart coordinates."""
        c = as_vector(coeffs, "coefficients")
        expr = parse("c1*x + c2*y + c3*z",
                     constants={"c1": c[0], "c2": c[1], "c3": c[2]})
        return cls(expr=expr, name=name)

    @classmethod
    def from_callable(cls, fn, name="callable"):
        return cls(fn=fn, name=name)

    def eval_batch(self, pts):
        pts = as_points(pts)
        if self._program is not None:
            return backend.eval_values(self._program, pts)
        return np.array([float(self._fn(p)) for p in pts])

    def eval(self, p):
        return float(self.eval_batch(as_vector(p, "point")[None])[0])

    def partials_batch(self, pts):
        pts = as_points(pts)
        if self._program is not None:
            _, grads = backend.eval_grad(self._program, pts, np.eye(3))
            return grads
        out = np.empty((pts.shape[0], 3))
        for k in range(3):
            h = _FD_STEP * np.maximum(1.0, np.abs(pts[:, k]))
            hi = pts.copy()
            hi[:, k] += h
            lo = pts.copy()
            lo[:, k] -= h
            out[:, k] = (self.eval_batch(hi) - self.eval_batch(lo)) / (2.0 * h)
        return out

    def partials(self, p):
        return self.partials_batch(as_vector(p, "point")[None])[0]

    def second_partials_batch(self, pts):
        pts = as_points(pts)
        n = pts.shape[0]
        hess = np.empty((n, 3, 3))
        for k in range(3):
            h = _FD_STEP * np.maximum(1.0, np.abs(pts[:, k]))
            hi = pts.copy()
            hi[:, k] += h
            lo = pts.copy()
            lo[:, k] -= h
            hess[:, k, :] = (self.partials_batch(hi) - self.partials_batch(lo)) / (
                2.0 * h
            )[:, None]
        return (hess + np.transpose(hess, (0, 2, 1))) / 2.0

    def second_partials(self, p):
        return self.second_partials_batch(as_vector(p, "point")[None])[0]

    def scaled(self, c):
        """The field c*f (same source kind); used by the scaling invariants."""
        if self._program is not None:
            from .expr import BinOp, Expr, Num

            root = self.expr.root
            scaled_root = BinOp(root.span, "*", Num(root.span, float(c)), root)
            return ScalarField(
                expr=Expr(scaled_root, self.expr.source),
                name=f"{c} * ({self.name})",
            )
        fn = self._fn
        return ScalarField(fn=lambda p: c * fn(p), name=f"{c} * ({self.name})")


# ---------------------------------------------------------------------------
# Batched tensor algebra


def inner_b(g, X, Y):
    return np.einsum("nij,ni,nj->n", g, X, Y)


def norm_b(g, X):
    return np.sqrt(inner_b(g, X, X))


def cross_b(g, X, Y):
    """Metric cross product: (X x Y)^k = g^{kl} sqrt(det g) eps_{lij} X^i Y^j."""
    cov = np.cross(X, Y)
    scale = np.sqrt(np.linalg.det(g))
    return scale[:, None] * np.einsum("nkl,nl->nk", np.linalg.inv(g), cov)


def christoffel_b(metric, pts):
    """Levi-Civita symbols (n, 3, 3, 3) indexed [point, k, i, j]."""
    pts = as_points(pts)
    g = metric.eval_batch(pts)
    if metric.is_constant:
        return np.zeros((pts.shape[0], 3, 3, 3))
    dg = metric.partials_batch(pts)
    # T[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij  (symmetric in i, j)
    t1 = np.transpose(dg, (0, 3, 1, 2))
    t2 = np.transpose(dg, (0, 3, 2, 1))
    combo = t1 + t2 - dg
    ginv = np.linalg.inv(g)
    return 0.5 * np.einsum("nkl,nlij->nkij", ginv, combo)


# ---------------------------------------------------------------------------
# Spec operations (single-point surface over the batched code paths)


def christoffel(metric, p):
    """Christoffel symbols of the second kind at p, shape (3, 3, 3) [k, i, j]."""
    return christoffel_b(metric, as_vector(p, "point")[None])[0]


def inner(metric, p, X, Y):
    g = metric.eval_batch(as_vector(p, "point")[None])
    val = float(inner_b(g, as_vector(X)[None], as_vector(Y)[None])[0])
    if not np.isfinite(val):
        raise NonFiniteValue("inner product is not finite")
    return val


def norm(metric, p, X):
    return float(np.sqrt(inner(metric, p, X, X)))


def cross(metric, p, X, Y):
    g = metric.eval_batch(as_vector(p, "point")[None])
    out = cross_b(g, as_vector(X)[None], as_vector(Y)[None])[0]
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue("cross product is not finite")
    return out


def gradient(field, metric, p):
    """(grad f)^i = g^{ij} d_j f, the metric dual of df."""
    p = as_vector(p, "point")
    g = metric.eval_batch(p[None])
    out = np.linalg.solve(g[0], field.partials(p))
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue("gradient is not finite")
    return out


def gradient_b(field, metric, pts):
    pts = as_points(pts)
    g = metric.eval_batch(pts)
    return np.linalg.solve(g, field.partials_batch(pts)[..., None])[..., 0]


def hessian(field, metric, p):
    """Covariant Hessian: Hess_ij = d_i d_j f - Gamma^k_ij d_k f."""
    p = as_vector(p, "point")
    gam = christoffel(metric, p)
    out = field.second_partials(p) - np.einsum("kij,k->ij", gam, field.partials(p))
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue("hessian is not finite")
    return out


def hessian_b(field, metric, pts):
    pts = as_points(pts)
    gam = christoffel_b(metric, pts)
    return field.second_partials_batch(pts) - np.einsum(
        "nkij,nk->nij", gam, field.partials_batch(pts)
    )


def covariant_derivative_along(curve, metric, vector_field, s, step=None):
    """(nabla_T V)^k = dV^k/ds + Gamma^k_ij T^i V^j at arc length s.

    ``vector_field`` is a callable s -> (3,) along the curve. dV/ds uses a
    second-order stencil with step 1e-5*max(1, |s|) (one-sided at domain
    ends).
    """
    s = float(s)
    s0, s1 = curve.domain
    h = step if step is not None else _FD_STEP * max(1.0, abs(s))
    if (s1 - s0) < 2.0 * h:
        raise HelixlabError(
            "curve domain too short to differentiate the vector field"
        )
    v_at = lambda u: as_vector(np.asarray(vector_field(u), dtype=float), "V(s)")
    if s - h < s0:
        dv = (-3.0 * v_at(s) + 4.0 * v_at(s + h) - v_at(s + 2 * h)) / (2.0 * h)
    elif s + h > s1:
        dv = (3.0 * v_at(s) - 4.0 * v_at(s - h) + v_at(s - 2 * h)) / (2.0 * h)
    else:
        dv = (v_at(s + h) - v_at(s - h)) / (2.0 * h)
    p = curve.eval(s)
    tangent = curve.derivative(s)
    gam = christoffel(metric, p)
    return dv + np.einsum("kij,i,j->k", gam, tangent, v_at(s))
