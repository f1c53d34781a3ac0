"""Expression language: parsing, printing, dual/jet arithmetic, errors."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helixlab.dual import DualNumber, Jet2, d_cos, d_exp, d_log, d_sin, d_sqrt, j_exp, j_log, j_sin, j_sqrt
from helixlab.errors import DomainError, ExprSyntaxError, UnknownIdentifier
from helixlab.expr import eval_dual, eval_jet2, eval_values, evaluate, parse

FINITE = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


# ---------------------------------------------------------------------------
# Parsing


def test_example_field_value():
    assert evaluate(parse("x + y^2 + z^2"), x=1, y=2, z=3) == 14.0


def test_bound_constants():
    expr = parse("w*sin(mu*s)", constants={"w": 2, "mu": 0.5})
    assert evaluate(expr, s=math.pi) == pytest.approx(2.0, abs=1e-15)


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("x + * y")
    assert err.value.offset == 4


@pytest.mark.parametrize(
    "source,value",
    [
        ("2^3^2", 512.0),  # right-associative power
        ("-2^2", -4.0),  # unary minus binds weaker than ^
        ("2^-2", 0.25),
        ("2 + 3 * 4", 14.0),
        ("(2 + 3) * 4", 20.0),
        ("6 / 3 / 2", 1.0),  # left-associative division
        ("1 - 2 - 3", -4.0),
        ("abs(-3) + sqrt(16)", 7.0),
        ("atan2(1, 1)", math.pi / 4),
        ("pi - e", math.pi - math.e),
        ("(-2)^3", -8.0),
        ("1.5e2 + 1e-1", 150.1),
    ],
)
def test_precedence_and_functions(source, value):
    assert evaluate(parse(source)) == pytest.approx(value, rel=1e-15)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        parse("foo + 1")
    with pytest.raises(UnknownIdentifier):
        parse("sin(q)")


def test_unknown_function_name():
    with pytest.raises(UnknownIdentifier):
        parse("sinh(x)")


def test_arity_check():
    with pytest.raises(ExprSyntaxError):
        parse("atan2(1)")
    with pytest.raises(ExprSyntaxError):
        parse("sin(1, 2)")


def test_trailing_garbage():
    with pytest.raises(ExprSyntaxError):
        parse("1 + 2 )")


# ---------------------------------------------------------------------------
# Round trip print -> parse


def _random_source(rng, depth=3, leaves=("x", "y", "z")):
    """Random expression text over guarded templates (no domain hazards)."""
    if depth == 0:
        return rng.choice(
            [*leaves, f"{rng.uniform(-2, 2):.6g}", "pi"]
        )
    kind = rng.integers(0, 7)
    a = _random_source(rng, depth - 1, leaves)
    b = _random_source(rng, depth - 1, leaves)
    if kind == 0:
        return f"({a} + {b})"
    if kind == 1:
        return f"({a} - {b})"
    if kind == 2:
        return f"({a} * {b})"
    if kind == 3:
        return f"({a} / (2 + cos({b})))"
    if kind == 4:
        return f"sin({a})"
    if kind == 5:
        return f"sqrt(1 + ({a})^2)"
    return f"exp(0.3 * sin({a}))"


def test_roundtrip_print_parse():
    rng = np.random.default_rng(7)
    for _ in range(200):
        source = _random_source(rng)
        expr = parse(source)
        reparsed = parse(expr.to_source())
        for _ in range(3):
            pt = dict(zip("xyz", rng.uniform(-2, 2, size=3)))
            v1 = evaluate(expr, **pt)
            v2 = evaluate(reparsed, **pt)
            assert v2 == pytest.approx(v1, rel=1e-12, abs=1e-12)


def test_determinism_same_source():
    a = parse("x + y^2 + sin(z)")
    b = parse("x + y^2 + sin(z)")
    assert repr(a.root) == repr(b.root)
    pt = {"x": 0.3, "y": -1.2, "z": 2.2}
    assert evaluate(a, **pt) == evaluate(b, **pt)


# ---------------------------------------------------------------------------
# Dual evaluation


def test_eval_dual_example_gradient():
    expr = parse("x + y^2 + z^2")
    for q in (0.0, 0.7, 2.4):
        d = eval_dual(expr, {"x": 0.0, "y": math.cos(q), "z": math.sin(q)},
                      ("x", "y", "z"))
        assert d.partials == pytest.approx(
            [1.0, 2 * math.cos(q), 2 * math.sin(q)], abs=1e-15
        )


def test_eval_dual_constant():
    d = eval_dual(parse("3.5 * pi"), {}, ())
    assert d.partials == pytest.approx([0.0, 0.0, 0.0])


def test_domain_error_sqrt():
    with pytest.raises(DomainError) as err:
        evaluate(parse("sqrt(x)"), x=-1.0)
    assert "sqrt(x)" in str(err.value)


def test_domain_error_log_division_pow():
    with pytest.raises(DomainError):
        evaluate(parse("log(x)"), x=0.0)
    with pytest.raises(DomainError):
        evaluate(parse("1 / (x - 1)"), x=1.0)
    with pytest.raises(DomainError):
        evaluate(parse("x ^ 0.5"), x=-2.0)
    with pytest.raises(DomainError):
        evaluate(parse("atan2(x, x)"), x=0.0)


def test_domain_error_constant_fold():
    with pytest.raises(DomainError):
        parse("sqrt(0 - 2)").program(("x",))


def test_nonfinite_flagged():
    with pytest.raises(DomainError):
        evaluate(parse("exp(x)"), x=1e4)


def test_derivatives_match_central_differences():
    rng = np.random.default_rng(11)
    h = 1e-6
    checked = 0
    for _ in range(200):
        source = _random_source(rng)
        expr = parse(source)
        names = tuple(sorted(expr.free_variables))
        if not names:
            continue
        prog = expr.program(names)
        pt = rng.uniform(-2, 2, size=len(names))
        seeds = np.eye(len(names), 3)
        from helixlab.expr import eval_grad

        vals, grads = eval_grad(prog, pt[None, :], seeds)
        for k, _name in enumerate(names[:3]):
            hi = pt.copy()
            hi[k] += h
            lo = pt.copy()
            lo[k] -= h
            fd = (eval_values(prog, hi[None, :])[0]
                  - eval_values(prog, lo[None, :])[0]) / (2 * h)
            scale = max(1.0, abs(fd))
            assert abs(grads[0, k] - fd) <= 1e-5 * scale, source
        checked += 1
    assert checked >= 150


def test_jet_second_derivative_matches_finite_differences():
    rng = np.random.default_rng(13)
    h = 1e-4
    for _ in range(50):
        source = _random_source(rng, leaves=("t",))
        expr = parse(source)
        if "t" not in expr.free_variables:
            continue
        prog = expr.program(("t",))
        t0 = rng.uniform(-1.5, 1.5)
        pts = np.array([[t0 - h], [t0], [t0 + h]])
        f = eval_values(prog, pts)
        _, d1, d2 = eval_jet2(prog, np.array([[t0]]), np.array([1.0]))
        fd1 = (f[2] - f[0]) / (2 * h)
        fd2 = (f[2] - 2 * f[1] + f[0]) / h**2
        assert d1[0] == pytest.approx(fd1, rel=1e-5, abs=1e-5)
        assert d2[0] == pytest.approx(fd2, rel=1e-3, abs=1e-3)


# ---------------------------------------------------------------------------
# DualNumber / Jet2 operation tables


@given(a=FINITE, b=FINITE, da=FINITE, db=FINITE)
def test_dual_product_rule(a, b, da, db):
    u = DualNumber(a, np.array([da, 0.0, 0.0]))
    v = DualNumber(b, np.array([db, 0.0, 0.0]))
    w = u * v
    assert w.value == a * b
    assert w.partials[0] == pytest.approx(a * db + b * da, rel=1e-12, abs=1e-12)


@given(a=FINITE, b=FINITE.filter(lambda x: abs(x) > 0.1), da=FINITE, db=FINITE)
def test_dual_quotient_rule(a, b, da, db):
    u = DualNumber(a, np.array([da, 0.0, 0.0]))
    v = DualNumber(b, np.array([db, 0.0, 0.0]))
    w = u / v
    assert w.value == pytest.approx(a / b, rel=1e-14)
    assert w.partials[0] == pytest.approx(
        (da * b - a * db) / b**2, rel=1e-10, abs=1e-12
    )


@given(a=FINITE, da=FINITE)
def test_dual_chain_rules(a, da):
    u = DualNumber(a, np.array([da, 0.0, 0.0]))
    assert d_sin(u).partials[0] == pytest.approx(math.cos(a) * da, abs=1e-14)
    assert d_cos(u).partials[0] == pytest.approx(-math.sin(a) * da, abs=1e-14)
    assert d_exp(u).partials[0] == pytest.approx(math.exp(a) * da, rel=1e-12, abs=1e-14)


def test_dual_domain_checks():
    bad = DualNumber(-1.0, np.array([1.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        d_log(bad)
    with pytest.raises(DomainError):
        d_sqrt(bad)
    with pytest.raises(DomainError):
        DualNumber(1.0) / DualNumber(0.0)


@given(a=FINITE, d1=FINITE, d2=FINITE)
def test_jet_exp_log_tables(a, d1, d2):
    u = Jet2(a, d1, d2)
    e = j_exp(u)
    assert e.d1 == pytest.approx(math.exp(a) * d1, rel=1e-12, abs=1e-12)
    assert e.d2 == pytest.approx(math.exp(a) * (d2 + d1 * d1), rel=1e-12, abs=1e-12)
    s = j_sin(u)
    assert s.d2 == pytest.approx(
        math.cos(a) * d2 - math.sin(a) * d1 * d1, rel=1e-12, abs=1e-12
    )


def test_jet_sqrt_against_closed_form():
    # f(t) = sqrt(2 + t) at t = 0.5
    u = Jet2(2.5, 1.0, 0.0)
    r = j_sqrt(u)
    assert r.f == pytest.approx(math.sqrt(2.5))
    assert r.d1 == pytest.approx(0.5 / math.sqrt(2.5))
    assert r.d2 == pytest.approx(-0.25 / 2.5**1.5)
    with pytest.raises(DomainError):
        j_log(Jet2(0.0, 1.0, 0.0))
