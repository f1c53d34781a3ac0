"""Curve representations and arc-length reparametrization."""

import numpy as np
import pytest

from helixlab.curves import (
    ParamCurve,
    SampledCurve,
    arclength_reparametrize,
    curve_from_samples,
)
from helixlab.errors import (
    IrregularCurve,
    NonMonotoneParameter,
    TooFewSamples,
)
from helixlab.frenet import frenet_series
from helixlab.manifold import MetricField

EU = MetricField.euclidean()
EX21_LENGTH = 4 * np.pi * np.sqrt(2)


def _ex21_param():
    return ParamCurve.from_expressions(
        "t/sqrt(2)", "cos(t/sqrt(2))", "sin(t/sqrt(2))", (0.0, EX21_LENGTH)
    )


def test_already_unit_speed_curve():
    unit = arclength_reparametrize(_ex21_param(), EU)
    ts = np.linspace(0.0, EX21_LENGTH, 17)
    np.testing.assert_allclose(unit.s_of_t(ts), ts, atol=1e-10)
    assert unit.length == pytest.approx(EX21_LENGTH, abs=1e-10)
    assert unit.max_speed_deviation < 1e-8


def test_circle_radius_two():
    circ = ParamCurve.from_expressions("2*cos(t)", "2*sin(t)", "0",
                                       (0.0, 2 * np.pi))
    unit = arclength_reparametrize(circ, EU)
    assert unit.length == pytest.approx(4 * np.pi, abs=1e-10)
    ts = np.linspace(0.0, 2 * np.pi, 9)
    np.testing.assert_allclose(unit.s_of_t(ts), 2 * ts, atol=1e-10)


def test_line_under_scaled_metric():
    line = ParamCurve.from_expressions("t", "0", "0", (0.0, 5.0))
    metric = MetricField.constant(np.diag([4.0, 1.0, 1.0]))
    unit = arclength_reparametrize(line, metric)
    assert unit.length == pytest.approx(10.0, abs=1e-12)
    np.testing.assert_allclose(
        unit.s_of_t(np.array([0.0, 2.0, 5.0])), [0.0, 4.0, 10.0], atol=1e-12
    )


def test_variable_speed_curve_roundtrip():
    curve = ParamCurve.from_expressions(
        "t + 0.3*sin(t)", "cos(t)", "0.5*t", (0.0, 4 * np.pi)
    )
    unit = arclength_reparametrize(curve, EU)
    assert unit.max_speed_deviation < 1e-8
    s = np.linspace(0.05 * unit.length, 0.95 * unit.length, 33)
    np.testing.assert_allclose(unit.s_of_t(unit.t_of_s(s)), s, atol=1e-8)


def test_length_additivity():
    curve = ParamCurve.from_expressions(
        "t + 0.3*sin(t)", "cos(t)", "0.5*t", (0.0, 4 * np.pi)
    )
    a, b, c = 0.0, 1.7, 4 * np.pi
    len_ab = arclength_reparametrize(curve.restricted(a, b), EU).length
    len_bc = arclength_reparametrize(curve.restricted(b, c), EU).length
    len_ac = arclength_reparametrize(curve.restricted(a, c), EU).length
    assert len_ab + len_bc == pytest.approx(len_ac, abs=1e-9)


def test_irregular_curve_rejected():
    flat = ParamCurve.from_expressions("t^2", "0", "0", (-1.0, 1.0))
    with pytest.raises(IrregularCurve):
        arclength_reparametrize(flat, EU)


def test_out_of_range_arclength():
    unit = arclength_reparametrize(_ex21_param(), EU)
    with pytest.raises(ValueError):
        unit.t_of_s(np.array([unit.length + 1.0]))


# ---------------------------------------------------------------------------
# Sampled curves


def test_sampled_curve_recovers_curvature():
    ts = np.linspace(0.0, 10.0, 1000)
    c = 1 / np.sqrt(2)
    pts = np.stack([ts * c, np.cos(ts * c), np.sin(ts * c)], axis=1)
    curve = curve_from_samples(SampledCurve(ts, pts))
    unit = arclength_reparametrize(curve, EU)
    series = frenet_series(unit, EU, np.linspace(0.5, unit.length - 0.5, 64))
    np.testing.assert_allclose(series.kappa, 0.5, atol=1e-4)
    np.testing.assert_allclose(series.tau, 0.5, atol=1e-4)


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        SampledCurve(np.array([0.0, 1.0, 2.0]), np.zeros((3, 3)))


def test_non_monotone_parameter():
    ts = np.array([0.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    with pytest.raises(NonMonotoneParameter):
        SampledCurve(ts, np.zeros((7, 3)))


def test_quintic_sampled_curve():
    ts = np.linspace(0.0, 2 * np.pi, 400)
    pts = np.stack([np.cos(ts), np.sin(ts), 0.2 * ts], axis=1)
    curve = curve_from_samples(SampledCurve(ts, pts, order=5))
    mid = np.pi
    np.testing.assert_allclose(
        curve.derivative(mid), [-np.sin(mid), np.cos(mid), 0.2], atol=1e-8
    )


def test_rigid_motion_of_curve_is_exact():
    rng = np.random.default_rng(21)
    base = _ex21_param()
    mat = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    if np.linalg.det(mat) < 0:
        mat[:, 0] = -mat[:, 0]
    shift = rng.normal(size=3)
    moved = base.transformed(mat, shift)
    ts = np.linspace(0.5, 5.0, 7)
    p, d1, d2 = base.jets_batch(ts)
    q, e1, e2 = moved.jets_batch(ts)
    np.testing.assert_allclose(q, p @ mat.T + shift, atol=1e-14)
    np.testing.assert_allclose(e1, d1 @ mat.T, atol=1e-14)
    np.testing.assert_allclose(e2, d2 @ mat.T, atol=1e-14)
