"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is pinned here, not configurable.
"""

import time

import numpy as np

from helixlab import analysis as an
from helixlab.analysis import covariant_derivative_field_b
from helixlab.cli import main
from helixlab.curves import ParamCurve, arclength_reparametrize
from helixlab.frenet import CurvatureProfile, frenet_series, slant_invariant_series
from helixlab.generate import (
    ProfileSpec,
    example_2_1,
    integrate_frenet,
    parallel_transport,
    precession_fixture,
)
from helixlab.manifold import (
    MetricField,
    ScalarField,
    covariant_derivative_along,
    cross_b,
    gradient,
    inner,
    inner_b,
)
from helpers import (
    half_space_loop,
    interior_grid,
    perturbed_helix,
    random_quadratic_field,
    random_rotation,
    random_spd_metric,
    unit_speed_helix,
)

EU = MetricField.euclidean()
SQ2 = np.sqrt(2.0)
SQ5 = np.sqrt(5.0)


def _report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------


def test_criterion_1_example_2_1_regression():
    """Frozen-value regression on the worked example at grid 1024."""
    start = time.perf_counter()
    curve, field_f, metric = example_2_1()
    grid = np.linspace(0.0, 4 * np.pi * SQ2, 1024)
    ctx = an.PairContext(field_f, curve, metric, grid)
    series = ctx.series
    rep = an.classify_pair(field_f, curve, metric, grid)
    elapsed = time.perf_counter() - start

    checks = {
        "grad_norm": np.max(np.abs(ctx.grad_norms - SQ5)) <= 1e-9,
        "cos_theta": np.max(np.abs(ctx.cos_theta_series + 2.0)) <= 1e-8,
        "kappa": np.max(np.abs(series.kappa - 0.5)) <= 1e-8,
        "tau": np.max(np.abs(series.tau - 0.5)) <= 1e-8,
        "W": np.max(np.abs(series.W - np.array([SQ2 / 2, 0.0, 0.0]))) <= 1e-8,
        "g_w": np.max(np.abs(ctx.gw_series - SQ2 / 2)) <= 1e-8,
        "n": abs(np.mean(ctx.n_series) - 1.0) <= 1e-8,
        "verdicts": rep.slant.is_slant_helix
        and rep.darboux.is_darboux_helix
        and rep.non_normed.is_darboux_helix,
        "runtime": elapsed < 1.0,
    }
    bad = [k for k, v in checks.items() if not v]
    _report(
        "criterion 1: Example 2.1 regression",
        not bad,
        f"runtime {elapsed:.3f}s" + (f", failing: {bad}" if bad else ""),
    )


def test_criterion_2_affinity_discrimination():
    curve, field_f, metric = example_2_1()
    grid = np.linspace(0.0, curve.length, 1024)
    fx = precession_fixture(2.0, 0.5)
    helix = unit_speed_helix(a=2.0, b=1.0)
    affine_field = ScalarField.from_expression("x + 2*y - z")

    residuals = []
    for c, g in (
        (curve, grid),
        (fx.curve, fx.grid),
        (helix, np.linspace(0.5, helix.length - 0.5, 512)),
    ):
        residuals.append(an.is_affine_along(affine_field, c, EU, g).max_residual)
    affine_ok = max(residuals) < 1e-9

    res = an.is_affine_along(field_f, curve, metric, grid)
    example_ok = (not res.is_affine) and abs(res.max_residual - SQ2) <= 1e-6
    _report(
        "criterion 2: affinity discrimination",
        affine_ok and example_ok,
        f"linear residual {max(residuals):.2e}, "
        f"example max residual {res.max_residual:.9f} vs sqrt(2)",
    )


def test_criterion_3_frenet_oracle_helix():
    helix = unit_speed_helix(a=2.0, b=1.0)
    grid = np.linspace(0.5, helix.length - 0.5, 512)
    series = frenet_series(helix, EU, grid)
    kappa_ok = np.max(np.abs(series.kappa - 0.4)) <= 1e-8
    tau_ok = np.max(np.abs(series.tau - 0.2)) <= 1e-8
    _report(
        "criterion 3: circular-helix Frenet oracle",
        kappa_ok and tau_ok,
        f"kappa dev {np.max(np.abs(series.kappa - 0.4)):.2e}, "
        f"tau dev {np.max(np.abs(series.tau - 0.2)):.2e}",
    )


def test_criterion_4_theorem_2_1_precession():
    fx = precession_fixture(2.0, 0.5, grid_count=2048)
    rep = an.verify_theorem_2_1(fx.field, fx.curve, fx.metric, fx.grid)
    inv_dev = np.max(
        np.abs(
            slant_invariant_series(
                CurvatureProfile.from_series(frenet_series(fx.curve, fx.metric,
                                                           fx.grid))
            )
            + 0.25
        )
    )
    ok = (
        rep.hypotheses_met
        and rep.passed
        and inv_dev < 1e-4
        and rep.axis.max_gradient_deviation < 1e-4
        and rep.axis.ambient_deviation < 1e-4
    )
    _report(
        "criterion 4: Theorem 2.1 on the precession fixture",
        ok,
        f"invariant dev {inv_dev:.2e}, axis dev "
        f"{rep.axis.max_gradient_deviation:.2e}, ambient dev "
        f"{rep.axis.ambient_deviation:.2e}",
    )


def test_criterion_5_theorem_2_2_decomposition():
    curve, field_f, metric = example_2_1()
    grid = np.linspace(0.0, curve.length, 1024)
    fx = precession_fixture(2.0, 0.5)
    details = []
    ok = True
    for name, (f, c, m, g) in {
        "example": (field_f, curve, metric, grid),
        "precession": (fx.field, fx.curve, fx.metric, fx.grid),
    }.items():
        rep = an.verify_theorem_2_2(f, c, m, g)
        ok = ok and rep.applicable and rep.implication_holds
        ok = ok and rep.decomposition_residual < 1e-4
        details.append(f"{name} residual {rep.decomposition_residual:.2e}")
    _report("criterion 5: Theorem 2.2 implication and decomposition", ok,
            "; ".join(details))


def test_criterion_6_theorem_2_3_corollaries():
    fx = precession_fixture(2.0, 0.5, grid_count=2048)
    cors = an.verify_corollaries_2_3_2_4(fx.field, fx.curve, fx.metric, fx.grid)
    t23 = an.verify_theorem_2_3(fx.field, fx.curve, fx.metric, fx.grid)
    equiv_ok = (
        cors.applicable and cors.passed and t23.applicable and t23.passed
    )

    # Eq. (19) residual on parallel fields (the fixture's axis field and a
    # scaled copy) where |tau'| is above the floor
    eq19_ok = True
    eq19_max = 0.0
    for f in (fx.field, fx.field.scaled(2.5)):
        ctx = an.PairContext(f, fx.curve, fx.metric, fx.grid)
        resid, mask = an.eq_19_residuals(
            ctx.grid, ctx.series.kappa, ctx.series.tau, ctx.frenet_components
        )
        eq19_max = max(eq19_max, float(np.max(np.abs(resid[mask]))))
        eq19_ok = eq19_ok and np.any(mask) and eq19_max < 1e-4

    # counterfixture: kappa = 1 + 0.3 s; no verdict pair may split
    profile = ProfileSpec("1 + 0.3*s", "1 + 0.1*s", 6.0)
    counter = integrate_frenet(profile)
    cgrid = np.linspace(0.2, 5.8, 512)
    crep = an.verify_corollaries_2_3_2_4(
        ScalarField.from_expression("x"), counter, EU, cgrid
    )
    counter_ok = (
        not crep.kappa2_plus_tau2.is_constant
        and crep.slant.is_slant_helix == crep.darboux.is_darboux_helix
        and crep.slant.is_slant_helix == crep.precession.is_constant_precession
    )
    _report(
        "criterion 6: Theorem 2.3 / Corollaries 2.1, 2.3, 2.4",
        equiv_ok and eq19_ok and counter_ok,
        f"eq19 max residual {eq19_max:.2e}; counterfixture verdicts "
        f"slant={crep.slant.is_slant_helix} "
        f"darboux={crep.darboux.is_darboux_helix}",
    )


def test_criterion_7_parallel_transport_suite():
    rng = np.random.default_rng(71)
    ok = True
    details = []

    # flat-space and curved-chart transport: residual and norm preservation
    curve, _, metric = example_2_1()
    hs = MetricField.half_space()
    hs_curve = arclength_reparametrize(half_space_loop(rng), hs)
    for label, (c, m) in {"euclidean": (curve, metric),
                          "half_space": (hs_curve, hs)}.items():
        grid = np.linspace(0.2, c.length - 0.2, 512)
        v0 = rng.normal(size=3)
        res = parallel_transport(c, m, v0, grid, components=False)
        v_fn = res.as_callable()
        worst = 0.0
        for s in np.linspace(grid[0] + 0.3, grid[-1] - 0.3, 7):
            cov = covariant_derivative_along(c, m, v_fn, float(s))
            g0 = m.eval(c.eval(float(s)))
            worst = max(worst, float(np.sqrt(cov @ g0 @ cov)))
        ok = ok and worst < 1e-6
        g = m.eval_batch(c.eval_batch(grid))
        norms = inner_b(g, res.vectors, res.vectors)
        norm_dev = float(np.max(np.abs(norms - norms[0])))
        ok = ok and norm_dev < 1e-8
        details.append(f"{label}: residual {worst:.2e}, norm dev {norm_dev:.2e}")

    # system (16) in Frenet components on frames-defined windows
    fx = precession_fixture(2.0, 0.5)
    comp_grid = np.linspace(fx.window[0], fx.window[1], 1024)
    res = parallel_transport(fx.curve, EU, rng.normal(size=3), comp_grid)
    series = frenet_series(fx.curve, EU, comp_grid)
    worst16 = 0.0
    for r in an.system_16_residuals(comp_grid, series.kappa, series.tau,
                                    res.components):
        worst16 = max(worst16, float(np.max(np.abs(r))))
    ok = ok and worst16 < 1e-4
    details.append(f"system16 {worst16:.2e}")
    _report("criterion 7: parallel-transport / system-(16) suite", ok,
            "; ".join(details))


def test_criterion_8_integrator_order():
    def closure_at(n):
        prof = ProfileSpec("1", "0", 2 * np.pi, step=2 * np.pi / n)
        unit = integrate_frenet(prof)
        return float(np.linalg.norm(unit.eval(unit.length) - unit.eval(0.0)))

    err_h = closure_at(2048)
    err_h2 = closure_at(4096)
    ratio = err_h / err_h2
    ok = ratio >= 12.0 and err_h2 < 1e-6
    _report(
        "criterion 8: integrator order",
        ok,
        f"closure {err_h2:.2e} at h = 2pi/4096, halving ratio {ratio:.1f}",
    )


def test_criterion_9_property_suites():
    rng = np.random.default_rng(91)
    failures = []

    # (a, b) frame orthonormality + Frenet/Darboux ODE residuals, 50 fixtures
    ortho_worst = 0.0
    ode_worst = 0.0
    for i in range(50):
        if i % 5 == 0:
            metric = MetricField.half_space()
            unit = arclength_reparametrize(half_space_loop(rng), metric)
        else:
            metric = EU
            unit = arclength_reparametrize(perturbed_helix(rng), metric)
        grid = interior_grid(unit, 10)
        series = frenet_series(unit, metric, grid)
        g = metric.eval_batch(unit.eval_batch(grid))
        for e in (series.T, series.N, series.B):
            ortho_worst = max(ortho_worst,
                              float(np.max(np.abs(inner_b(g, e, e) - 1.0))))
        for a, b in ((series.T, series.N), (series.T, series.B),
                     (series.N, series.B)):
            ortho_worst = max(ortho_worst,
                              float(np.max(np.abs(inner_b(g, a, b)))))

        def field(which):
            return lambda s_arr: getattr(frenet_series(unit, metric, s_arr),
                                         which)

        cov_t = covariant_derivative_field_b(unit, metric, field("T"), grid)
        cov_n = covariant_derivative_field_b(unit, metric, field("N"), grid)
        cov_b = covariant_derivative_field_b(unit, metric, field("B"), grid)
        resids = (
            cov_t - series.kappa[:, None] * series.N,
            cov_n + series.kappa[:, None] * series.T
            - series.tau[:, None] * series.B,
            cov_b + series.tau[:, None] * series.N,
            cov_t - cross_b(g, series.W, series.T),
            cov_n - cross_b(g, series.W, series.N),
            cov_b - cross_b(g, series.W, series.B),
        )
        for r in resids:
            ode_worst = max(ode_worst,
                            float(np.max(np.sqrt(inner_b(g, r, r)))))
    if ortho_worst >= 1e-6:
        failures.append(f"orthonormality {ortho_worst:.2e}")
    if ode_worst >= 1e-5:
        failures.append(f"ODE residuals {ode_worst:.2e}")

    # (c) cross-product orthogonality, 50 fixtures
    cross_worst = 0.0
    for _ in range(50):
        metric = random_spd_metric(rng)
        p = rng.uniform(-1.5, 1.5, size=3)
        x = rng.normal(size=3)
        y = rng.normal(size=3)
        g = metric.eval_batch(p[None])
        xy = cross_b(g, x[None], y[None])[0]
        cross_worst = max(
            cross_worst,
            abs(inner(metric, p, xy, x)),
            abs(inner(metric, p, xy, y)),
        )
    if cross_worst >= 1e-9:
        failures.append(f"cross orthogonality {cross_worst:.2e}")

    # (d) gradient duality, 50 fixtures x 2 probes
    dual_worst = 0.0
    h = 1e-6
    for _ in range(50):
        metric = random_spd_metric(rng)
        f = random_quadratic_field(rng)
        for _ in range(2):
            p = rng.uniform(-1.5, 1.5, size=3)
            x = rng.normal(size=3)
            grad = gradient(f, metric, p)
            directional = (f.eval(p + h * x) - f.eval(p - h * x)) / (2 * h)
            rel = abs(inner(metric, p, grad, x) - directional) / max(
                1.0, abs(directional)
            )
            dual_worst = max(dual_worst, rel)
    if dual_worst >= 1e-5:
        failures.append(f"gradient duality {dual_worst:.2e}")

    # (e) field-scaling invariance of verdicts: exact booleans, 50 fixtures
    curve, field_f, metric = example_2_1()
    grid = np.linspace(0.0, curve.length, 128)
    base = an.classify_pair(field_f, curve, metric, grid)
    scale_ok = True
    for _ in range(50):
        c = float(rng.uniform(0.2, 5.0) * rng.choice([-1.0, 1.0]))
        rep = an.classify_pair(field_f.scaled(c), curve, metric, grid)
        scale_ok = scale_ok and (
            rep.slant.is_slant_helix == base.slant.is_slant_helix
            and rep.darboux.is_darboux_helix == base.darboux.is_darboux_helix
            and rep.non_normed.is_darboux_helix
            == base.non_normed.is_darboux_helix
            and rep.eikonal.is_eikonal == base.eikonal.is_eikonal
            and rep.affine.is_affine == base.affine.is_affine
        )
    if not scale_ok:
        failures.append("field scaling flipped a verdict")

    # (f) rigid-motion invariance of kappa, tau, and the slant invariant
    helix = ParamCurve.from_expressions("2*cos(t)", "2*sin(t)", "t",
                                        (0.0, 4 * np.pi))
    ref_unit = arclength_reparametrize(helix, EU)
    ref_grid = np.linspace(0.5, ref_unit.length - 0.5, 24)
    ref = frenet_series(ref_unit, EU, ref_grid)
    ref_inv = slant_invariant_series(CurvatureProfile.from_series(ref))
    motion_worst = 0.0
    for _ in range(50):
        rot = random_rotation(rng)
        shift = rng.normal(size=3)
        moved = arclength_reparametrize(helix.transformed(rot, shift), EU)
        series = frenet_series(moved, EU, ref_grid)
        inv = slant_invariant_series(CurvatureProfile.from_series(series))
        motion_worst = max(
            motion_worst,
            float(np.max(np.abs(series.kappa - ref.kappa))),
            float(np.max(np.abs(series.tau - ref.tau))),
            float(np.max(np.abs(inv - ref_inv))),
        )
    if motion_worst >= 1e-8:
        failures.append(f"rigid motion {motion_worst:.2e}")

    _report(
        "criterion 9: randomized property suites",
        not failures,
        f"ortho {ortho_worst:.1e}, ode {ode_worst:.1e}, cross "
        f"{cross_worst:.1e}, duality {dual_worst:.1e}, motion "
        f"{motion_worst:.1e}" + (f"; failures: {failures}" if failures else ""),
    )


def test_criterion_10_report_determinism(tmp_path):
    cfg = tmp_path / "ex21.cfg"
    cfg.write_text(
        "metric.preset = euclidean\n"
        "curve.x = t/sqrt(2)\n"
        "curve.y = cos(t/sqrt(2))\n"
        "curve.z = sin(t/sqrt(2))\n"
        "curve.t_min = 0\n"
        "curve.t_max = 17.77153175263346\n"
        "field.f = x + y^2 + z^2\n"
        "grid.count = 1024\n"
    )
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    rc1 = main(["classify", "--config", str(cfg), "--out", str(out1)])
    rc2 = main(["classify", "--config", str(cfg), "--out", str(out2)])
    identical = out1.read_bytes() == out2.read_bytes()
    _report(
        "criterion 10: byte-identical classification reports",
        rc1 == 0 and rc2 == 0 and identical,
        f"{len(out1.read_bytes())} bytes",
    )
