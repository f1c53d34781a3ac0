"""Shared fixture builders for the test suite.

Randomized geometry fixtures are built from guarded templates so curvature
stays bounded away from zero and metrics stay positive definite on the probe
region; every generator takes an explicit rng for reproducibility.
"""

import numpy as np

from helixlab.curves import ParamCurve, arclength_reparametrize
from helixlab.manifold import MetricField, ScalarField


def random_rotation(rng):
    """Haar-ish random proper rotation matrix."""
    mat = rng.normal(size=(3, 3))
    q, r = np.linalg.qr(mat)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def perturbed_helix(rng, eps=0.04):
    """Helix with small trig perturbations; curvature stays well above 0."""
    a = rng.uniform(1.2, 2.0)
    b = rng.uniform(0.4, 0.9)
    consts = {
        "a": a,
        "b": b,
        "p1": eps * rng.uniform(-1, 1),
        "p2": eps * rng.uniform(-1, 1),
        "p3": eps * rng.uniform(-1, 1),
    }
    return ParamCurve.from_expressions(
        "a*cos(t) + p1*sin(2*t)",
        "a*sin(t) + p2*cos(3*t)",
        "b*t + p3*sin(t)",
        (0.0, 2.0 * np.pi),
        constants=consts,
    )


def half_space_loop(rng):
    """Closed-ish curve staying inside z > 1 for the hyperbolic chart."""
    consts = {
        "r": rng.uniform(0.8, 1.2),
        "h": rng.uniform(1.8, 2.4),
        "q": 0.2 * rng.uniform(-1, 1),
    }
    return ParamCurve.from_expressions(
        "r*cos(t)",
        "r*sin(t)",
        "h + q*sin(2*t)",
        (0.0, 2.0 * np.pi),
        constants=consts,
    )


def random_spd_metric(rng):
    """Expression metric, diagonally dominant so it stays SPD everywhere."""
    consts = {
        "d1": rng.uniform(-0.2, 0.2),
        "d2": rng.uniform(-0.2, 0.2),
        "d3": rng.uniform(-0.2, 0.2),
        "o12": rng.uniform(-0.05, 0.05),
        "o13": rng.uniform(-0.05, 0.05),
        "o23": rng.uniform(-0.05, 0.05),
    }
    entries = {
        "g11": "1 + d1*sin(x + y)",
        "g22": "1 + d2*cos(y - z)",
        "g33": "1 + d3*sin(z + x)",
        "g12": "o12*cos(x)",
        "g13": "o13*sin(y)",
        "g23": "o23*cos(z)",
    }
    return MetricField.from_expressions(entries, constants=consts)


def random_quadratic_field(rng):
    consts = {f"c{i}": rng.uniform(-1.5, 1.5) for i in range(1, 7)}
    return ScalarField.from_expression(
        "c1*x + c2*y + c3*z + c4*x*y + c5*y*z + c6*z^2", constants=consts
    )


def unit_speed_helix(metric=None, a=2.0, b=1.0, turns=3.0):
    curve = ParamCurve.from_expressions(
        "a*cos(t)", "a*sin(t)", "b*t", (0.0, 2.0 * np.pi * turns),
        constants={"a": a, "b": b},
    )
    return arclength_reparametrize(curve, metric or MetricField.euclidean())


def interior_grid(curve, count, margin=0.05):
    lo, hi = curve.domain
    pad = margin * (hi - lo)
    return np.linspace(lo + pad, hi - pad, count)
