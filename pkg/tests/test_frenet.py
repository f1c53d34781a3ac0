"""Frenet apparatus, Darboux vectors, and the slant-helix invariant."""

import numpy as np
import pytest

from helixlab.analysis import covariant_derivative_field_b
from helixlab.curves import ParamCurve, arclength_reparametrize
from helixlab.errors import DegenerateFrame
from helixlab.frenet import (
    CurvatureProfile,
    darboux,
    frenet_apparatus,
    frenet_series,
    slant_invariant,
    slant_invariant_series,
    unit_darboux,
)
from helixlab.manifold import MetricField, cross_b, inner_b
from helpers import (
    half_space_loop,
    interior_grid,
    perturbed_helix,
    random_rotation,
    unit_speed_helix,
)

EU = MetricField.euclidean()
SQ2 = np.sqrt(2.0)


def _ex21():
    curve = ParamCurve.from_expressions(
        "t/sqrt(2)", "cos(t/sqrt(2))", "sin(t/sqrt(2))", (0.0, 4 * np.pi * SQ2)
    )
    return arclength_reparametrize(curve, EU)


# ---------------------------------------------------------------------------
# Frenet apparatus


def test_example_2_1_apparatus():
    unit = _ex21()
    grid = np.linspace(0.0, unit.length, 64)
    series = frenet_series(unit, EU, grid)
    np.testing.assert_allclose(series.kappa, 0.5, atol=1e-8)
    np.testing.assert_allclose(series.tau, 0.5, atol=1e-8)
    expected_n = np.stack(
        [np.zeros_like(grid), -np.cos(grid / SQ2), -np.sin(grid / SQ2)], axis=1
    )
    np.testing.assert_allclose(series.N, expected_n, atol=1e-8)


def test_circular_helix_closed_form():
    # kappa = a/(a^2+b^2), tau = b/(a^2+b^2)
    unit = unit_speed_helix(a=2.0, b=1.0)
    grid = np.linspace(0.5, unit.length - 0.5, 48)
    series = frenet_series(unit, EU, grid)
    np.testing.assert_allclose(series.kappa, 0.4, atol=1e-8)
    np.testing.assert_allclose(series.tau, 0.2, atol=1e-8)


def test_straight_line_degenerate():
    line = ParamCurve.from_expressions("t", "0", "0", (0.0, 5.0))
    unit = arclength_reparametrize(line, EU)
    with pytest.raises(DegenerateFrame):
        frenet_apparatus(unit, EU, 2.0)


def test_frame_orthonormal_under_metric():
    rng = np.random.default_rng(31)
    hs = MetricField.half_space()
    unit = arclength_reparametrize(half_space_loop(rng), hs)
    grid = interior_grid(unit, 24)
    series = frenet_series(unit, hs, grid)
    g = hs.eval_batch(unit.eval_batch(grid))
    for e in (series.T, series.N, series.B):
        np.testing.assert_allclose(inner_b(g, e, e), 1.0, atol=1e-6)
    for a, b in ((series.T, series.N), (series.T, series.B), (series.N, series.B)):
        np.testing.assert_allclose(inner_b(g, a, b), 0.0, atol=1e-6)
    np.testing.assert_allclose(cross_b(g, series.T, series.N), series.B, atol=1e-6)


# ---------------------------------------------------------------------------
# Darboux vectors


def test_darboux_example_2_1():
    unit = _ex21()
    for s in (0.0, 3.0, 10.0):
        sample = frenet_apparatus(unit, EU, s)
        np.testing.assert_allclose(darboux(sample), [SQ2 / 2, 0, 0], atol=1e-8)
        np.testing.assert_allclose(sample.W, [SQ2 / 2, 0, 0], atol=1e-8)
        np.testing.assert_allclose(unit_darboux(sample), [1.0, 0, 0], atol=1e-7)
        np.testing.assert_allclose(sample.W0, unit_darboux(sample), atol=1e-12)


def test_darboux_zero_torsion_reduces_to_binormal_term():
    circ = ParamCurve.from_expressions("cos(t)", "sin(t)", "0", (0.0, 2 * np.pi))
    unit = arclength_reparametrize(circ, EU)
    sample = frenet_apparatus(unit, EU, 1.0)
    assert abs(sample.tau) < 1e-8
    np.testing.assert_allclose(darboux(sample), sample.kappa * sample.B, atol=1e-8)
    np.testing.assert_allclose(unit_darboux(sample), sample.B, atol=1e-7)


def test_darboux_helix_axis_is_fixed():
    # axis of the circular helix: W = (0, 0, 1/sqrt(a^2+b^2)) in the chart
    unit = unit_speed_helix(a=2.0, b=1.0)
    grid = np.linspace(0.5, unit.length - 0.5, 32)
    series = frenet_series(unit, EU, grid)
    expected = np.broadcast_to(np.array([0.0, 0.0, 1 / np.sqrt(5)]), series.W.shape)
    np.testing.assert_allclose(series.W, expected, atol=1e-8)
    np.testing.assert_allclose(
        series.W, 0.2 * series.T + 0.4 * series.B, atol=1e-8
    )


def test_unit_darboux_is_unit():
    rng = np.random.default_rng(32)
    unit = arclength_reparametrize(perturbed_helix(rng), EU)
    grid = interior_grid(unit, 16)
    series = frenet_series(unit, EU, grid)
    norms = np.linalg.norm(series.W0, axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-8)


# ---------------------------------------------------------------------------
# Frenet system and Darboux identity residuals


def _frame_field(unit, metric, which):
    def fn(s_arr):
        return getattr(frenet_series(unit, metric, s_arr), which)

    return fn


@pytest.mark.parametrize("metric_kind", ["euclidean", "half_space"])
def test_frenet_ode_residuals(metric_kind):
    rng = np.random.default_rng(33)
    if metric_kind == "euclidean":
        metric = EU
        unit = arclength_reparametrize(perturbed_helix(rng), metric)
    else:
        metric = MetricField.half_space()
        unit = arclength_reparametrize(half_space_loop(rng), metric)
    grid = interior_grid(unit, 16)
    series = frenet_series(unit, metric, grid)
    g = metric.eval_batch(unit.eval_batch(grid))

    cov_t = covariant_derivative_field_b(unit, metric, _frame_field(unit, metric, "T"), grid)
    cov_n = covariant_derivative_field_b(unit, metric, _frame_field(unit, metric, "N"), grid)
    cov_b = covariant_derivative_field_b(unit, metric, _frame_field(unit, metric, "B"), grid)

    r1 = cov_t - series.kappa[:, None] * series.N
    r2 = cov_n + series.kappa[:, None] * series.T - series.tau[:, None] * series.B
    r3 = cov_b + series.tau[:, None] * series.N
    for resid in (r1, r2, r3):
        assert np.max(np.sqrt(inner_b(g, resid, resid))) < 1e-5

    # Darboux identity: nabla_T X = W x X for X in {T, N, B}
    for cov, vec in ((cov_t, series.T), (cov_n, series.N), (cov_b, series.B)):
        resid = cov - cross_b(g, series.W, vec)
        assert np.max(np.sqrt(inner_b(g, resid, resid))) < 1e-5


def test_rigid_motion_invariance():
    rng = np.random.default_rng(34)
    base = ParamCurve.from_expressions(
        "2*cos(t)", "2*sin(t)", "t", (0.0, 4 * np.pi)
    )
    unit = arclength_reparametrize(base, EU)
    grid = np.linspace(0.5, unit.length - 0.5, 24)
    ref = frenet_series(unit, EU, grid)
    ref_inv = slant_invariant_series(CurvatureProfile.from_series(ref))
    for _ in range(10):
        rot = random_rotation(rng)
        shift = rng.normal(size=3)
        moved = arclength_reparametrize(base.transformed(rot, shift), EU)
        series = frenet_series(moved, EU, grid)
        np.testing.assert_allclose(series.kappa, ref.kappa, atol=1e-8)
        np.testing.assert_allclose(series.tau, ref.tau, atol=1e-8)
        inv = slant_invariant_series(CurvatureProfile.from_series(series))
        np.testing.assert_allclose(inv, ref_inv, atol=1e-8)


# ---------------------------------------------------------------------------
# Slant invariant


def test_slant_invariant_constant_curvatures():
    s = np.linspace(0.0, 10.0, 128)
    profile = CurvatureProfile(s, np.full_like(s, 0.5), np.full_like(s, 0.5))
    np.testing.assert_allclose(slant_invariant_series(profile), 0.0, atol=1e-12)
    assert slant_invariant(profile, s[64]) == pytest.approx(0.0, abs=1e-12)


def test_slant_invariant_general_helix_zero():
    # constant tau/kappa with varying kappa still gives zero
    rng = np.random.default_rng(35)
    for _ in range(10):
        s = np.linspace(0.0, 8.0, 256)
        kappa = 1.0 + 0.4 * np.sin(rng.uniform(0.5, 1.5) * s)
        ratio = rng.uniform(0.3, 2.0)
        profile = CurvatureProfile(s, kappa, ratio * kappa)
        np.testing.assert_allclose(slant_invariant_series(profile), 0.0, atol=1e-8)


def test_slant_invariant_precession_profile():
    w, mu = 2.0, 0.5
    s = np.linspace(0.4, np.pi / mu - 0.4, 2048)
    profile = CurvatureProfile(s, w * np.sin(mu * s), w * np.cos(mu * s),
                               provenance="prescribed")
    np.testing.assert_allclose(slant_invariant_series(profile), -mu / w, atol=1e-4)


def test_slant_invariant_degenerate_kappa():
    s = np.linspace(0.0, 1.0, 64)
    profile = CurvatureProfile(s, np.full_like(s, 1e-9), np.ones_like(s),
                               provenance="prescribed")
    with pytest.raises(DegenerateFrame):
        slant_invariant_series(profile)


def test_slant_invariant_off_grid_rejected():
    s = np.linspace(0.0, 1.0, 64)
    profile = CurvatureProfile(s, np.ones_like(s), np.ones_like(s))
    with pytest.raises(ValueError):
        slant_invariant(profile, 0.5 * (s[1] + s[2]))


def test_profile_validation():
    s = np.linspace(0.0, 1.0, 64)
    with pytest.raises(ValueError):
        CurvatureProfile(s[::-1], np.ones_like(s), np.ones_like(s))
    with pytest.raises(DegenerateFrame):
        CurvatureProfile(s, np.zeros_like(s), np.ones_like(s))
