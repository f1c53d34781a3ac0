"""Pure numpy kernel backend.

Mirrors the compiled kernels in ``_core.pyx``: expression-tape evaluation
(values, 3-slot duals, order-2 jets) and the two fixed-step RK4 integrators.
All tape evaluators return ``(result..., status, instr, point)`` tuples using
the status codes from ``expr``; callers raise through ``expr.raise_status``.

Dual and jet registers hold whole point batches, so the Python-level loop is
only over tape instructions.
"""

import numpy as np

from . import dual as du
from .expr import (
    OP_ABS,
    OP_ADD,
    OP_ATAN2,
    OP_CONST,
    OP_COS,
    OP_DIV,
    OP_EXP,
    OP_LOG,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_POWI,
    OP_SIN,
    OP_SQRT,
    OP_SUB,
    OP_TAN,
    OP_VAR,
    STATUS_ATAN2_ORIGIN,
    STATUS_DIV_ZERO,
    STATUS_LOG_DOMAIN,
    STATUS_NON_FINITE,
    STATUS_OK,
    STATUS_POW_DOMAIN,
    STATUS_SQRT_DOMAIN,
)

name = "pure"


def _quiet(fn):
    """Non-finite intermediates are converted to status codes, so numpy's
    own overflow/invalid warnings are just noise here."""
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return fn(*args, **kwargs)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _first(mask):
    return int(np.argmax(mask))


def _check_unary(op, v):
    """Domain pre-check; returns (status, point) or (0, -1)."""
    if op == OP_LOG and np.any(v <= 0.0):
        return STATUS_LOG_DOMAIN, _first(v <= 0.0)
    if op == OP_SQRT and np.any(v < 0.0):
        return STATUS_SQRT_DOMAIN, _first(v < 0.0)
    return STATUS_OK, -1


def _check_pow(base, expo):
    bad = (base < 0.0) & (expo != np.floor(expo))
    if np.any(bad):
        return STATUS_POW_DOMAIN, _first(bad)
    bad = (base == 0.0) & (expo < 0.0)
    if np.any(bad):
        return STATUS_POW_DOMAIN, _first(bad)
    return STATUS_OK, -1


@_quiet
def eval_values(ops, arg1, arg2, consts, points):
    npts = points.shape[0]
    regs = [None] * len(ops)
    for i, op in enumerate(ops):
        a, b = arg1[i], arg2[i]
        if op == OP_CONST:
            r = np.full(npts, consts[a])
        elif op == OP_VAR:
            r = points[:, a].copy()
        elif op == OP_ADD:
            r = regs[a] + regs[b]
        elif op == OP_SUB:
            r = regs[a] - regs[b]
        elif op == OP_MUL:
            r = regs[a] * regs[b]
        elif op == OP_DIV:
            if np.any(regs[b] == 0.0):
                return None, STATUS_DIV_ZERO, i, _first(regs[b] == 0.0)
            r = regs[a] / regs[b]
        elif op == OP_POW:
            st, pt = _check_pow(regs[a], regs[b])
            if st:
                return None, st, i, pt
            r = np.power(regs[a], regs[b])
        elif op == OP_POWI:
            if b < 0 and np.any(regs[a] == 0.0):
                return None, STATUS_DIV_ZERO, i, _first(regs[a] == 0.0)
            r = np.power(regs[a], float(b))
        elif op == OP_NEG:
            r = -regs[a]
        elif op == OP_SIN:
            r = np.sin(regs[a])
        elif op == OP_COS:
            r = np.cos(regs[a])
        elif op == OP_TAN:
            r = np.tan(regs[a])
        elif op == OP_EXP:
            r = np.exp(regs[a])
        elif op == OP_LOG:
            st, pt = _check_unary(OP_LOG, regs[a])
            if st:
                return None, st, i, pt
            r = np.log(regs[a])
        elif op == OP_SQRT:
            st, pt = _check_unary(OP_SQRT, regs[a])
            if st:
                return None, st, i, pt
            r = np.sqrt(regs[a])
        elif op == OP_ABS:
            r = np.abs(regs[a])
        elif op == OP_ATAN2:
            bad = (regs[a] == 0.0) & (regs[b] == 0.0)
            if np.any(bad):
                return None, STATUS_ATAN2_ORIGIN, i, _first(bad)
            r = np.arctan2(regs[a], regs[b])
        else:  # pragma: no cover - compiler emits only known opcodes
            raise AssertionError(f"bad opcode {op}")
        ok = np.isfinite(r)
        if not ok.all():
            return None, STATUS_NON_FINITE, i, _first(~ok)
        regs[i] = r
    return regs[len(ops) - 1], STATUS_OK, -1, -1


@_quiet
def eval_grad(ops, arg1, arg2, consts, points, seeds):
    """Dual-register tape walk; returns (vals, grads, status, instr, point)."""
    npts = points.shape[0]
    regs = [None] * len(ops)
    for i, op in enumerate(ops):
        a, b = arg1[i], arg2[i]
        try:
            if op == OP_CONST:
                r = du.DualNumber(np.full(npts, consts[a]))
            elif op == OP_VAR:
                r = du.DualNumber(
                    points[:, a].copy(),
                    np.broadcast_to(seeds[a], (npts, 3)).copy(),
                )
            elif op == OP_ADD:
                r = regs[a] + regs[b]
            elif op == OP_SUB:
                r = regs[a] - regs[b]
            elif op == OP_MUL:
                r = regs[a] * regs[b]
            elif op == OP_DIV:
                r = regs[a] / regs[b]
            elif op == OP_POW:
                r = du.d_pow(regs[a], regs[b])
            elif op == OP_POWI:
                r = du.d_powi(regs[a], b)
            elif op == OP_NEG:
                r = -regs[a]
            elif op == OP_SIN:
                r = du.d_sin(regs[a])
            elif op == OP_COS:
                r = du.d_cos(regs[a])
            elif op == OP_TAN:
                r = du.d_tan(regs[a])
            elif op == OP_EXP:
                r = du.d_exp(regs[a])
            elif op == OP_LOG:
                r = du.d_log(regs[a])
            elif op == OP_SQRT:
                r = du.d_sqrt(regs[a])
            elif op == OP_ABS:
                r = du.d_abs(regs[a])
            elif op == OP_ATAN2:
                r = du.d_atan2(regs[a], regs[b])
            else:  # pragma: no cover
                raise AssertionError(f"bad opcode {op}")
        except du.DomainError as exc:
            return None, None, _status_of(exc), i, exc.bad_index or 0
        if not (np.all(np.isfinite(r.value)) and np.all(np.isfinite(r.partials))):
            bad = ~np.isfinite(r.value)
            pt = _first(bad) if bad.any() else _first(
                ~np.isfinite(r.partials).all(axis=-1)
            )
            return None, None, STATUS_NON_FINITE, i, pt
        regs[i] = r
    out = regs[len(ops) - 1]
    return out.value, out.partials, STATUS_OK, -1, -1


@_quiet
def eval_jet2(ops, arg1, arg2, consts, points, seed):
    """Jet-register tape walk; returns (f, d1, d2, status, instr, point)."""
    npts = points.shape[0]
    regs = [None] * len(ops)
    for i, op in enumerate(ops):
        a, b = arg1[i], arg2[i]
        try:
            if op == OP_CONST:
                r = du.Jet2(np.full(npts, consts[a]))
            elif op == OP_VAR:
                r = du.Jet2(points[:, a].copy(), np.full(npts, seed[a]))
            elif op == OP_ADD:
                r = regs[a] + regs[b]
            elif op == OP_SUB:
                r = regs[a] - regs[b]
            elif op == OP_MUL:
                r = regs[a] * regs[b]
            elif op == OP_DIV:
                r = regs[a] / regs[b]
            elif op == OP_POW:
                r = du.j_pow(regs[a], regs[b])
            elif op == OP_POWI:
                r = du.j_powi(regs[a], b)
            elif op == OP_NEG:
                r = -regs[a]
            elif op == OP_SIN:
                r = du.j_sin(regs[a])
            elif op == OP_COS:
                r = du.j_cos(regs[a])
            elif op == OP_TAN:
                r = du.j_tan(regs[a])
            elif op == OP_EXP:
                r = du.j_exp(regs[a])
            elif op == OP_LOG:
                r = du.j_log(regs[a])
            elif op == OP_SQRT:
                r = du.j_sqrt(regs[a])
            elif op == OP_ABS:
                r = du.j_abs(regs[a])
            elif op == OP_ATAN2:
                r = du.j_atan2(regs[a], regs[b])
            else:  # pragma: no cover
                raise AssertionError(f"bad opcode {op}")
        except du.DomainError as exc:
            return None, None, None, _status_of(exc), i, exc.bad_index or 0
        finite = (
            np.all(np.isfinite(r.f))
            and np.all(np.isfinite(r.d1))
            and np.all(np.isfinite(r.d2))
        )
        if not finite:
            bad = ~(np.isfinite(r.f) & np.isfinite(r.d1) & np.isfinite(r.d2))
            return None, None, None, STATUS_NON_FINITE, i, _first(bad)
        regs[i] = r
    out = regs[len(ops) - 1]
    return out.f, out.d1, out.d2, STATUS_OK, -1, -1


_STATUS_BY_MESSAGE = {
    "division by zero": STATUS_DIV_ZERO,
    "log of a non-positive value": STATUS_LOG_DOMAIN,
    "sqrt of a negative value": STATUS_SQRT_DOMAIN,
    "negative base with non-integer exponent": STATUS_POW_DOMAIN,
    "zero base with negative exponent": STATUS_POW_DOMAIN,
    "atan2 at the origin": STATUS_ATAN2_ORIGIN,
}


def _status_of(exc):
    text = exc.args[0].split(" in '")[0]
    return _STATUS_BY_MESSAGE.get(text, STATUS_NON_FINITE)


# ---------------------------------------------------------------------------
# RK4 integrators


def _frame_rhs(state, kappa, tau):
    out = np.empty_like(state)
    out[0] = state[1]
    out[1] = kappa * state[2]
    out[2] = -kappa * state[1] + tau * state[3]
    out[3] = -tau * state[2]
    return out


def _drift(frame):
    gram = frame @ frame.T
    return float(np.max(np.abs(gram - np.eye(3))))


def _mgs(frame):
    t = frame[0] / np.linalg.norm(frame[0])
    n = frame[1] - (frame[1] @ t) * t
    n /= np.linalg.norm(n)
    b = frame[2] - (frame[2] @ t) * t - (frame[2] @ n) * n
    b /= np.linalg.norm(b)
    return np.array([t, n, b])


def rk4_frenet(kappa_st, tau_st, h, state0, drift_tol):
    """Integrate the flat-space Frenet system from stage-sampled profiles.

    kappa_st/tau_st hold profile values at s = 0, h/2, h, 3h/2, ... (2N+1
    entries for N steps). state0 is (4, 3): position, T, N, B. Returns
    (pos, T, N, B, drifts, status, step) where status 1 means the frame
    drifted past drift_tol at the reported step.
    """
    n_steps = (len(kappa_st) - 1) // 2
    pos = np.empty((n_steps + 1, 3))
    tt = np.empty((n_steps + 1, 3))
    nn = np.empty((n_steps + 1, 3))
    bb = np.empty((n_steps + 1, 3))
    drifts = np.zeros(n_steps)
    state = np.asarray(state0, dtype=float).copy()
    pos[0], tt[0], nn[0], bb[0] = state
    for i in range(n_steps):
        k0, k1, k2 = kappa_st[2 * i], kappa_st[2 * i + 1], kappa_st[2 * i + 2]
        t0, t1, t2 = tau_st[2 * i], tau_st[2 * i + 1], tau_st[2 * i + 2]
        a = _frame_rhs(state, k0, t0)
        b = _frame_rhs(state + 0.5 * h * a, k1, t1)
        c = _frame_rhs(state + 0.5 * h * b, k1, t1)
        d = _frame_rhs(state + h * c, k2, t2)
        state = state + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        drifts[i] = _drift(state[1:])
        if drifts[i] > drift_tol:
            return pos, tt, nn, bb, drifts, 1, i
        state[1:] = _mgs(state[1:])
        pos[i + 1], tt[i + 1], nn[i + 1], bb[i + 1] = state
    return pos, tt, nn, bb, drifts, 0, -1


def rk4_linear3(mats_st, v0, h):
    """Integrate dV/ds = A(s) V with A stage-sampled as in rk4_frenet."""
    n_steps = (mats_st.shape[0] - 1) // 2
    out = np.empty((n_steps + 1, 3))
    v = np.asarray(v0, dtype=float).copy()
    out[0] = v
    for i in range(n_steps):
        a0, a1, a2 = mats_st[2 * i], mats_st[2 * i + 1], mats_st[2 * i + 2]
        ka = a0 @ v
        kb = a1 @ (v + 0.5 * h * ka)
        kc = a1 @ (v + 0.5 * h * kb)
        kd = a2 @ (v + h * kc)
        v = v + (h / 6.0) * (ka + 2.0 * kb + 2.0 * kc + kd)
        out[i + 1] = v
    return out
