"""Compiled vs pure kernel agreement and backend selection."""

import os
import subprocess
import sys

import numpy as np
import pytest

from helixlab import _pure, backend
from helixlab.errors import DomainError
from helixlab.expr import compile_program, parse

try:
    from helixlab import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="extension not built")

PROGRAMS = [
    "x + y^2 + z^2",
    "x*sin(y) + exp(z/4) - atan2(y, 1 + x^2)",
    "sqrt(1 + x^2) ^ 1.5 / (2 + cos(y*z))",
    "abs(x - y) * tan(z/3) + log(2 + x^2)",
    "(x + y)^3 - 2^x",
]


def _prog(source, names=("x", "y", "z")):
    return compile_program(parse(source), names)


@needs_compiled
@pytest.mark.parametrize("source", PROGRAMS)
def test_values_and_grads_agree(source):
    rng = np.random.default_rng(hash(source) % 2**32)
    prog = _prog(source)
    pts = rng.uniform(0.1, 2.0, size=(64, 3))
    v_pure = backend.eval_values(prog, pts, backend=_pure)
    v_core = backend.eval_values(prog, pts, backend=_core)
    np.testing.assert_allclose(v_core, v_pure, rtol=1e-13, atol=1e-13)
    seeds = np.eye(3)
    _, g_pure = backend.eval_grad(prog, pts, seeds, backend=_pure)
    _, g_core = backend.eval_grad(prog, pts, seeds, backend=_core)
    np.testing.assert_allclose(g_core, g_pure, rtol=1e-12, atol=1e-12)


@needs_compiled
def test_jets_agree():
    rng = np.random.default_rng(3)
    prog = _prog("2*sin(0.5*t)*cos(t)^2 + sqrt(1 + t^2)", ("t",))
    pts = rng.uniform(-2, 2, size=(64, 1))
    out_pure = backend.eval_jet2(prog, pts, np.ones(1), backend=_pure)
    out_core = backend.eval_jet2(prog, pts, np.ones(1), backend=_core)
    for a, b in zip(out_pure, out_core):
        np.testing.assert_allclose(b, a, rtol=1e-12, atol=1e-12)


@needs_compiled
def test_rk4_kernels_agree():
    rng = np.random.default_rng(5)
    n = 128
    stages = np.linspace(0.0, 3.0, 2 * n + 1)
    kappa = 1.0 + 0.2 * np.sin(stages)
    tau = 0.5 + 0.1 * np.cos(stages)
    state0 = np.vstack([np.zeros(3), np.eye(3)])
    r_pure = backend.rk4_frenet(kappa, tau, 3.0 / n, state0, 1e-3, backend=_pure)
    r_core = backend.rk4_frenet(kappa, tau, 3.0 / n, state0, 1e-3, backend=_core)
    assert r_pure[5] == r_core[5] == 0
    for a, b in zip(r_pure[:5], r_core[:5]):
        np.testing.assert_allclose(b, a, rtol=1e-12, atol=1e-13)
    mats = 0.2 * rng.normal(size=(2 * n + 1, 3, 3))
    v_pure = backend.rk4_linear3(mats, np.array([1.0, -2.0, 0.5]), 3.0 / n,
                                 backend=_pure)
    v_core = backend.rk4_linear3(mats, np.array([1.0, -2.0, 0.5]), 3.0 / n,
                                 backend=_core)
    np.testing.assert_allclose(v_core, v_pure, rtol=1e-12, atol=1e-13)


@needs_compiled
@pytest.mark.parametrize(
    "source,point",
    [
        ("log(x)", [-1.0, 0.0, 0.0]),
        ("sqrt(x - 2)", [0.0, 0.0, 0.0]),
        ("1/(x - 1)", [1.0, 0.0, 0.0]),
        ("(0 - x)^y", [2.0, 0.5, 0.0]),
    ],
)
def test_domain_errors_agree(source, point):
    prog = _prog(source)
    pts = np.asarray([point])
    for mod in (_pure, _core):
        with pytest.raises(DomainError):
            backend.eval_values(prog, pts, backend=mod)


def test_pure_rhs_and_drift_error():
    # a wild step must report StepTooLarge through the status channel
    n = 4
    stages = np.linspace(0.0, 4.0, 2 * n + 1)
    kappa = np.full(2 * n + 1, 50.0)
    tau = np.zeros(2 * n + 1)
    state0 = np.vstack([np.zeros(3), np.eye(3)])
    pos, tt, nn, bb, drifts, status, step = _pure.rk4_frenet(
        kappa, tau, 1.0, state0, 1e-6
    )
    assert status == 1 and step == 0


def test_backend_env_selection():
    code = (
        "import helixlab; print(helixlab.backend_name())"
    )
    env = dict(os.environ, HELIXLAB_BACKEND="pure")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "pure"
    env_default = dict(os.environ)
    env_default.pop("HELIXLAB_BACKEND", None)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env_default, capture_output=True,
        text=True,
    )
    expected = "compiled" if _core is not None else "pure"
    assert out.stdout.strip() == expected


def test_thread_chunking_is_bit_stable():
    prog = _prog("x*sin(y) + cos(z)")
    rng = np.random.default_rng(9)
    pts = rng.normal(size=(512, 3))
    base = backend.eval_values(prog, pts)

    def chunk(p):
        return (backend.eval_values(prog, p),)

    os.environ["HELIXLAB_THREADS"] = "4"
    try:
        chunked = backend.parallel_map_chunks(chunk, (pts,), 1)[0]
    finally:
        os.environ.pop("HELIXLAB_THREADS", None)
    assert np.array_equal(chunked, base)


def test_threaded_frenet_series_identical(monkeypatch):
    import numpy as np

    from helixlab.frenet import frenet_series
    from helixlab.generate import example_2_1

    curve, _, metric = example_2_1()
    grid = np.linspace(0.0, curve.length, 512)
    base = frenet_series(curve, metric, grid)
    monkeypatch.setenv("HELIXLAB_THREADS", "4")
    threaded = frenet_series(curve, metric, grid)
    for name in ("T", "N", "B", "kappa", "tau", "W", "W0"):
        assert np.array_equal(getattr(threaded, name), getattr(base, name))


@needs_compiled
def test_random_program_fuzz_agreement():
    # the two kernels are independent implementations of one table; fuzz
    # them against each other over the guarded expression templates
    from test_expr import _random_source

    from helixlab.expr import parse

    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(80):
        source = _random_source(rng)
        expr = parse(source)
        names = tuple(sorted(expr.free_variables))
        if not names:
            continue
        prog = expr.program(names)
        pts = rng.uniform(-2, 2, size=(16, len(names)))
        v_p = backend.eval_values(prog, pts, backend=_pure)
        v_c = backend.eval_values(prog, pts, backend=_core)
        np.testing.assert_allclose(v_c, v_p, rtol=1e-12, atol=1e-12,
                                   err_msg=source)
        seeds = np.eye(len(names), 3)
        _, g_p = backend.eval_grad(prog, pts, seeds, backend=_pure)
        _, g_c = backend.eval_grad(prog, pts, seeds, backend=_core)
        np.testing.assert_allclose(g_c, g_p, rtol=1e-11, atol=1e-11,
                                   err_msg=source)
        checked += 1
    assert checked >= 60

    # univariate jets through the same templates
    checked = 0
    for _ in range(60):
        source = _random_source(rng, leaves=("t",))
        expr = parse(source)
        if "t" not in expr.free_variables:
            continue
        prog = expr.program(("t",))
        pts = rng.uniform(-2, 2, size=(16, 1))
        out_p = backend.eval_jet2(prog, pts, np.ones(1), backend=_pure)
        out_c = backend.eval_jet2(prog, pts, np.ones(1), backend=_core)
        for a, b in zip(out_p, out_c):
            np.testing.assert_allclose(b, a, rtol=1e-10, atol=1e-10,
                                       err_msg=source)
        checked += 1
    assert checked >= 40
