# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Mirrors the pure numpy backend in ``_pure.py`` (and the chain-rule tables in
``dual.py``); opcode and status numbers must stay in sync with ``expr.py``.
Differences are limited to floating-point rounding of libm vs numpy ufuncs.
"""

import numpy as np

from libc.math cimport atan2, cos, exp, fabs, floor, isfinite, log, pow, sin, sqrt, tan

name = "compiled"

cdef enum:
    OP_CONST = 0
    OP_VAR = 1
    OP_ADD = 2
    OP_SUB = 3
    OP_MUL = 4
    OP_DIV = 5
    OP_POW = 6
    OP_POWI = 7
    OP_NEG = 8
    OP_SIN = 9
    OP_COS = 10
    OP_TAN = 11
    OP_EXP = 12
    OP_LOG = 13
    OP_SQRT = 14
    OP_ABS = 15
    OP_ATAN2 = 16

cdef enum:
    ST_OK = 0
    ST_DIV_ZERO = 1
    ST_LOG_DOMAIN = 2
    ST_SQRT_DOMAIN = 3
    ST_POW_DOMAIN = 4
    ST_ATAN2_ORIGIN = 5
    ST_NON_FINITE = 6


def eval_values(int[::1] ops, int[::1] arg1, int[::1] arg2, double[::1] consts,
                double[:, ::1] points):
    cdef Py_ssize_t ni = ops.shape[0]
    cdef Py_ssize_t npts = points.shape[0]
    out_arr = np.empty(npts, dtype=np.float64)
    regs_arr = np.empty(ni, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] regs = regs_arr
    cdef Py_ssize_t p, i
    cdef int op, a, b
    cdef int status = ST_OK
    cdef Py_ssize_t err_instr = -1, err_pt = -1
    cdef double va, vb, r

    with nogil:
        for p in range(npts):
            for i in range(ni):
                op = ops[i]
                a = arg1[i]
                b = arg2[i]
                if op == OP_CONST:
                    r = consts[a]
                elif op == OP_VAR:
                    r = points[p, a]
                elif op == OP_ADD:
                    r = regs[a] + regs[b]
                elif op == OP_SUB:
                    r = regs[a] - regs[b]
                elif op == OP_MUL:
                    r = regs[a] * regs[b]
                elif op == OP_DIV:
                    vb = regs[b]
                    if vb == 0.0:
                        status = ST_DIV_ZERO
                        break
                    r = regs[a] / vb
                elif op == OP_POW:
                    va = regs[a]
                    vb = regs[b]
                    if va < 0.0 and vb != floor(vb):
                        status = ST_POW_DOMAIN
                        break
                    if va == 0.0 and vb < 0.0:
                        status = ST_POW_DOMAIN
                        break
                    r = pow(va, vb)
                elif op == OP_POWI:
                    va = regs[a]
                    if b < 0 and va == 0.0:
                        status = ST_DIV_ZERO
                        break
                    r = pow(va, <double> b)
                elif op == OP_NEG:
                    r = -regs[a]
                elif op == OP_SIN:
                    r = sin(regs[a])
                elif op == OP_COS:
                    r = cos(regs[a])
                elif op == OP_TAN:
                    r = tan(regs[a])
                elif op == OP_EXP:
                    r = exp(regs[a])
                elif op == OP_LOG:
                    va = regs[a]
                    if va <= 0.0:
                        status = ST_LOG_DOMAIN
                        break
                    r = log(va)
                elif op == OP_SQRT:
                    va = regs[a]
                    if va < 0.0:
                        status = ST_SQRT_DOMAIN
                        break
                    r = sqrt(va)
                elif op == OP_ABS:
                    r = fabs(regs[a])
                else:  # OP_ATAN2
                    va = regs[a]
                    vb = regs[b]
                    if va == 0.0 and vb == 0.0:
                        status = ST_ATAN2_ORIGIN
                        break
                    r = atan2(va, vb)
                if not isfinite(r):
                    status = ST_NON_FINITE
                    break
                regs[i] = r
            if status != ST_OK:
                err_instr = i
                err_pt = p
                break
            out[p] = regs[ni - 1]
    if status != ST_OK:
        return None, status, err_instr, err_pt
    return out_arr, ST_OK, -1, -1


def eval_grad(int[::1] ops, int[::1] arg1, int[::1] arg2, double[::1] consts,
              double[:, ::1] points, double[:, ::1] seeds):
    cdef Py_ssize_t ni = ops.shape[0]
    cdef Py_ssize_t npts = points.shape[0]
    vals_arr = np.empty(npts, dtype=np.float64)
    grads_arr = np.empty((npts, 3), dtype=np.float64)
    regs_arr = np.empty(4 * ni, dtype=np.float64)
    cdef double[::1] vals = vals_arr
    cdef double[:, ::1] grads = grads_arr
    cdef double[::1] regs = regs_arr
    cdef Py_ssize_t p, i
    cdef int op, a, b, k
    cdef int status = ST_OK
    cdef Py_ssize_t err_instr = -1, err_pt = -1
    cdef double va, vb, r, coef, logu, q
    cdef bint varies

    with nogil:
        for p in range(npts):
            for i in range(ni):
                op = ops[i]
                a = arg1[i]
                b = arg2[i]
                if op == OP_CONST:
                    regs[4 * i] = consts[a]
                    for k in range(3):
                        regs[4 * i + 1 + k] = 0.0
                elif op == OP_VAR:
                    regs[4 * i] = points[p, a]
                    for k in range(3):
                        regs[4 * i + 1 + k] = seeds[a, k]
                elif op == OP_ADD:
                    regs[4 * i] = regs[4 * a] + regs[4 * b]
                    for k in range(3):
                        regs[4 * i + 1 + k] = regs[4 * a + 1 + k] + regs[4 * b + 1 + k]
                elif op == OP_SUB:
                    regs[4 * i] = regs[4 * a] - regs[4 * b]
                    for k in range(3):
                        regs[4 * i + 1 + k] = regs[4 * a + 1 + k] - regs[4 * b + 1 + k]
                elif op == OP_MUL:
                    va = regs[4 * a]
                    vb = regs[4 * b]
                    regs[4 * i] = va * vb
                    for k in range(3):
                        regs[4 * i + 1 + k] = (
                            vb * regs[4 * a + 1 + k] + va * regs[4 * b + 1 + k]
                        )
                elif op == OP_DIV:
                    vb = regs[4 * b]
                    if vb == 0.0:
                        status = ST_DIV_ZERO
                        break
                    r = regs[4 * a] / vb
                    regs[4 * i] = r
                    for k in range(3):
                        regs[4 * i + 1 + k] = (
                            regs[4 * a + 1 + k] - r * regs[4 * b + 1 + k]
                        ) / vb
                elif op == OP_POW:
                    va = regs[4 * a]
                    vb = regs[4 * b]
                    if va < 0.0 and vb != floor(vb):
                        status = ST_POW_DOMAIN
                        break
                    if va == 0.0 and vb < 0.0:
                        status = ST_POW_DOMAIN
                        break
                    r = pow(va, vb)
                    varies = (
                        regs[4 * b + 1] != 0.0
                        or regs[4 * b + 2] != 0.0
                        or regs[4 * b + 3] != 0.0
                    )
                    if varies:
                        if va <= 0.0:
                            status = ST_LOG_DOMAIN
                            break
                        logu = log(va)
                        coef = vb * pow(va, vb - 1.0)
                        for k in range(3):
                            regs[4 * i + 1 + k] = (
                                r * logu * regs[4 * b + 1 + k]
                                + coef * regs[4 * a + 1 + k]
                            )
                    else:
                        coef = vb * pow(va, vb - 1.0)
                        for k in range(3):
                            regs[4 * i + 1 + k] = coef * regs[4 * a + 1 + k]
                    regs[4 * i] = r
                elif op == OP_POWI:
                    va = regs[4 * a]
                    if b < 0 and va == 0.0:
                        status = ST_DIV_ZERO
                        break
                    if b == 0:
                        regs[4 * i] = 1.0
                        for k in range(3):
                            regs[4 * i + 1 + k] = 0.0
                    else:
                        regs[4 * i] = pow(va, <double> b)
                        coef = b * pow(va, <double> (b - 1))
                        for k in range(3):
                            regs[4 * i + 1 + k] = coef * regs[4 * a + 1 + k]
                elif op == OP_NEG:
                    regs[4 * i] = -regs[4 * a]
                    for k in range(3):
                        regs[4 * i + 1 + k] = -regs[4 * a + 1 + k]
                elif op == OP_SIN:
                    va = regs[4 * a]
                    regs[4 * i] = sin(va)
                    coef = cos(va)
                    for k in range(3):
                        regs[4 * i + 1 + k] = coef * regs[4 * a + 1 + k]
                elif op == OP_COS:
                    va = regs[4 * a]
                    regs[4 * i] = cos(va)
                    coef = -sin(va)
                    for k in range(3):
                        regs[4 * i + 1 + k] = coef * regs[4 * a + 1 + k]
                elif op == OP_TAN:
                    r = tan(regs[4 * a])
                    regs[4 * i] = r
                    coef = 1.0 + r * r
                    for k in range(3):
                        regs[4 * i + 1 + k] = coef * regs[4 * a + 1 + k]
                elif op == OP_EXP:
                    r = exp(regs[4 * a])
                    regs[4 * i] = r
                    for k in range(3):
                        regs[4 * i + 1 + k] = r * regs[4 * a + 1 + k]
                elif op == OP_LOG:
                    va = regs[4 * a]
                    if va <= 0.0:
                        status = ST_LOG_DOMAIN
                        break
                    regs[4 * i] = log(va)
                    for k in range(3):
                        regs[4 * i + 1 + k] = regs[4 * a + 1 + k] / va
                elif op == OP_SQRT:
                    va = regs[4 * a]
                    if va < 0.0:
                        status = ST_SQRT_DOMAIN
                        break
                    r = sqrt(va)
                    regs[4 * i] = r
                    for k in range(3):
                        regs[4 * i + 1 + k] = regs[4 * a + 1 + k] / (2.0 * r)
                elif op == OP_ABS:
                    va = regs[4 * a]
                    regs[4 * i] = fabs(va)
                    coef = 0.0 if va == 0.0 else (1.0 if va > 0.0 else -1.0)
                    for k in range(3):
                        regs[4 * i + 1 + k] = coef * regs[4 * a + 1 + k]
                else:  # OP_ATAN2
                    va = regs[4 * a]  # y
                    vb = regs[4 * b]  # x
                    if va == 0.0 and vb == 0.0:
                        status = ST_ATAN2_ORIGIN
                        break
                    q = va * va + vb * vb
                    regs[4 * i] = atan2(va, vb)
                    for k in range(3):
                        regs[4 * i + 1 + k] = (
                            vb * regs[4 * a + 1 + k] - va * regs[4 * b + 1 + k]
                        ) / q
                if not isfinite(regs[4 * i]):
                    status = ST_NON_FINITE
                    break
                for k in range(3):
                    if not isfinite(regs[4 * i + 1 + k]):
                        status = ST_NON_FINITE
                        break
                if status != ST_OK:
                    break
            if status != ST_OK:
                err_instr = i
                err_pt = p
                break
            vals[p] = regs[4 * (ni - 1)]
            for k in range(3):
                grads[p, k] = regs[4 * (ni - 1) + 1 + k]
    if status != ST_OK:
        return None, None, status, err_instr, err_pt
    return vals_arr, grads_arr, ST_OK, -1, -1


def eval_jet2(int[::1] ops, int[::1] arg1, int[::1] arg2, double[::1] consts,
              double[:, ::1] points, double[::1] seed):
    cdef Py_ssize_t ni = ops.shape[0]
    cdef Py_ssize_t npts = points.shape[0]
    f_arr = np.empty(npts, dtype=np.float64)
    d1_arr = np.empty(npts, dtype=np.float64)
    d2_arr = np.empty(npts, dtype=np.float64)
    regs_arr = np.empty(3 * ni, dtype=np.float64)
    cdef double[::1] fo = f_arr
    cdef double[::1] d1o = d1_arr
    cdef double[::1] d2o = d2_arr
    cdef double[::1] regs = regs_arr
    cdef Py_ssize_t p, i
    cdef int op, a, b
    cdef int status = ST_OK
    cdef Py_ssize_t err_instr = -1, err_pt = -1
    cdef double u, u1, u2, w, w1, w2, r, r1, r2, coef, coef2, q, q1, q2, s_, c_, logu
    cdef bint varies

    with nogil:
        for p in range(npts):
            for i in range(ni):
                op = ops[i]
                a = arg1[i]
                b = arg2[i]
                if op >= OP_ADD:
                    u = regs[3 * a]
                    u1 = regs[3 * a + 1]
                    u2 = regs[3 * a + 2]
                if op == OP_CONST:
                    r = consts[a]
                    r1 = 0.0
                    r2 = 0.0
                elif op == OP_VAR:
                    r = points[p, a]
                    r1 = seed[a]
                    r2 = 0.0
                elif op == OP_ADD:
                    r = u + regs[3 * b]
                    r1 = u1 + regs[3 * b + 1]
                    r2 = u2 + regs[3 * b + 2]
                elif op == OP_SUB:
                    r = u - regs[3 * b]
                    r1 = u1 - regs[3 * b + 1]
                    r2 = u2 - regs[3 * b + 2]
                elif op == OP_MUL:
                    w = regs[3 * b]
                    w1 = regs[3 * b + 1]
                    w2 = regs[3 * b + 2]
                    r = u * w
                    r1 = u1 * w + u * w1
                    r2 = u2 * w + 2.0 * u1 * w1 + u * w2
                elif op == OP_DIV:
                    w = regs[3 * b]
                    if w == 0.0:
                        status = ST_DIV_ZERO
                        break
                    w1 = regs[3 * b + 1]
                    w2 = regs[3 * b + 2]
                    r = u / w
                    r1 = (u1 - r * w1) / w
                    r2 = (u2 - 2.0 * r1 * w1 - r * w2) / w
                elif op == OP_POW:
                    w = regs[3 * b]
                    w1 = regs[3 * b + 1]
                    w2 = regs[3 * b + 2]
                    if u < 0.0 and w != floor(w):
                        status = ST_POW_DOMAIN
                        break
                    if u == 0.0 and w < 0.0:
                        status = ST_POW_DOMAIN
                        break
                    varies = w1 != 0.0 or w2 != 0.0
                    if varies:
                        # u^w = exp(w log u)
                        if u <= 0.0:
                            status = ST_LOG_DOMAIN
                            break
                        logu = log(u)
                        # jet of q = w * log(u); coef/coef2 = jet of log(u)
                        coef = u1 / u
                        coef2 = u2 / u - coef * coef
                        q = w * logu
                        q1 = w1 * logu + w * coef
                        q2 = w2 * logu + 2.0 * w1 * coef + w * coef2
                        r = exp(q)
                        r1 = r * q1
                        r2 = r * (q2 + q1 * q1)
                    else:
                        r = pow(u, w)
                        coef = w * pow(u, w - 1.0)
                        coef2 = w * (w - 1.0) * pow(u, w - 2.0)
                        r1 = coef * u1
                        r2 = coef2 * u1 * u1 + coef * u2
                elif op == OP_POWI:
                    if b < 0 and u == 0.0:
                        status = ST_DIV_ZERO
                        break
                    if b == 0:
                        r = 1.0
                        r1 = 0.0
                        r2 = 0.0
                    else:
                        r = pow(u, <double> b)
                        coef = b * pow(u, <double> (b - 1))
                        if b == 1:
                            coef2 = 0.0
                        else:
                            coef2 = b * (b - 1) * pow(u, <double> (b - 2))
                        r1 = coef * u1
                        r2 = coef2 * u1 * u1 + coef * u2
                elif op == OP_NEG:
                    r = -u
                    r1 = -u1
                    r2 = -u2
                elif op == OP_SIN:
                    s_ = sin(u)
                    c_ = cos(u)
                    r = s_
                    r1 = c_ * u1
                    r2 = c_ * u2 - s_ * u1 * u1
                elif op == OP_COS:
                    s_ = sin(u)
                    c_ = cos(u)
                    r = c_
                    r1 = -s_ * u1
                    r2 = -s_ * u2 - c_ * u1 * u1
                elif op == OP_TAN:
                    r = tan(u)
                    coef = 1.0 + r * r
                    r1 = coef * u1
                    r2 = coef * u2 + 2.0 * r * coef * u1 * u1
                elif op == OP_EXP:
                    r = exp(u)
                    r1 = r * u1
                    r2 = r * (u2 + u1 * u1)
                elif op == OP_LOG:
                    if u <= 0.0:
                        status = ST_LOG_DOMAIN
                        break
                    r = log(u)
                    r1 = u1 / u
                    r2 = u2 / u - r1 * r1
                elif op == OP_SQRT:
                    if u < 0.0:
                        status = ST_SQRT_DOMAIN
                        break
                    r = sqrt(u)
                    r1 = u1 / (2.0 * r)
                    r2 = (u2 - 2.0 * r1 * r1) / (2.0 * r)
                elif op == OP_ABS:
                    coef = 0.0 if u == 0.0 else (1.0 if u > 0.0 else -1.0)
                    r = fabs(u)
                    r1 = coef * u1
                    r2 = coef * u2
                else:  # OP_ATAN2: a = y, b = x
                    w = regs[3 * b]
                    w1 = regs[3 * b + 1]
                    w2 = regs[3 * b + 2]
                    if u == 0.0 and w == 0.0:
                        status = ST_ATAN2_ORIGIN
                        break
                    q = w * w + u * u
                    r = atan2(u, w)
                    r1 = (w * u1 - u * w1) / q
                    q1 = 2.0 * (w * w1 + u * u1)
                    r2 = (w * u2 - u * w2) / q - r1 * q1 / q
                if not (isfinite(r) and isfinite(r1) and isfinite(r2)):
                    status = ST_NON_FINITE
                    break
                regs[3 * i] = r
                regs[3 * i + 1] = r1
                regs[3 * i + 2] = r2
            if status != ST_OK:
                err_instr = i
                err_pt = p
                break
            fo[p] = regs[3 * (ni - 1)]
            d1o[p] = regs[3 * (ni - 1) + 1]
            d2o[p] = regs[3 * (ni - 1) + 2]
    if status != ST_OK:
        return None, None, None, status, err_instr, err_pt
    return f_arr, d1_arr, d2_arr, ST_OK, -1, -1


def rk4_frenet(double[::1] kappa_st, double[::1] tau_st, double h,
               double[:, ::1] state0, double drift_tol):
    """Fixed-step RK4 on the flat Frenet system with per-step MGS."""
    cdef Py_ssize_t n_steps = (kappa_st.shape[0] - 1) // 2
    pos_arr = np.empty((n_steps + 1, 3), dtype=np.float64)
    t_arr = np.empty((n_steps + 1, 3), dtype=np.float64)
    n_arr = np.empty((n_steps + 1, 3), dtype=np.float64)
    b_arr = np.empty((n_steps + 1, 3), dtype=np.float64)
    drift_arr = np.zeros(n_steps, dtype=np.float64)
    cdef double[:, ::1] pos = pos_arr
    cdef double[:, ::1] tt = t_arr
    cdef double[:, ::1] nn = n_arr
    cdef double[:, ::1] bb = b_arr
    cdef double[::1] drifts = drift_arr
    cdef double state[12]
    cdef double tmp[12]
    cdef double ka[12]
    cdef double kb[12]
    cdef double kc[12]
    cdef double kd[12]
    cdef Py_ssize_t i, j
    cdef double k0, k1, k2, t0, t1, t2, drift, nrm, d01, d02, d12
    cdef int status = 0
    cdef Py_ssize_t err_step = -1

    for j in range(3):
        state[j] = state0[0, j]
        state[3 + j] = state0[1, j]
        state[6 + j] = state0[2, j]
        state[9 + j] = state0[3, j]
    with nogil:
        for j in range(3):
            pos[0, j] = state[j]
            tt[0, j] = state[3 + j]
            nn[0, j] = state[6 + j]
            bb[0, j] = state[9 + j]
        for i in range(n_steps):
            k0 = kappa_st[2 * i]
            k1 = kappa_st[2 * i + 1]
            k2 = kappa_st[2 * i + 2]
            t0 = tau_st[2 * i]
            t1 = tau_st[2 * i + 1]
            t2 = tau_st[2 * i + 2]
            _frame_rhs(state, k0, t0, ka)
            for j in range(12):
                tmp[j] = state[j] + 0.5 * h * ka[j]
            _frame_rhs(tmp, k1, t1, kb)
            for j in range(12):
                tmp[j] = state[j] + 0.5 * h * kb[j]
            _frame_rhs(tmp, k1, t1, kc)
            for j in range(12):
                tmp[j] = state[j] + h * kc[j]
            _frame_rhs(tmp, k2, t2, kd)
            for j in range(12):
                state[j] = state[j] + (h / 6.0) * (
                    ka[j] + 2.0 * kb[j] + 2.0 * kc[j] + kd[j]
                )
            # frame drift before re-orthonormalization
            drift = fabs(_dot3(state, 3, 3) - 1.0)
            if fabs(_dot3(state, 6, 6) - 1.0) > drift:
                drift = fabs(_dot3(state, 6, 6) - 1.0)
            if fabs(_dot3(state, 9, 9) - 1.0) > drift:
                drift = fabs(_dot3(state, 9, 9) - 1.0)
            d01 = fabs(_dot3(state, 3, 6))
            d02 = fabs(_dot3(state, 3, 9))
            d12 = fabs(_dot3(state, 6, 9))
            if d01 > drift:
                drift = d01
            if d02 > drift:
                drift = d02
            if d12 > drift:
                drift = d12
            drifts[i] = drift
            if drift > drift_tol:
                status = 1
                err_step = i
                break
            # modified Gram-Schmidt on (T, N, B)
            nrm = sqrt(_dot3(state, 3, 3))
            for j in range(3):
                state[3 + j] /= nrm
            d01 = _dot3(state, 6, 3)
            for j in range(3):
                state[6 + j] -= d01 * state[3 + j]
            nrm = sqrt(_dot3(state, 6, 6))
            for j in range(3):
                state[6 + j] /= nrm
            d02 = _dot3(state, 9, 3)
            d12 = _dot3(state, 9, 6)
            for j in range(3):
                state[9 + j] -= d02 * state[3 + j] + d12 * state[6 + j]
            nrm = sqrt(_dot3(state, 9, 9))
            for j in range(3):
                state[9 + j] /= nrm
            for j in range(3):
                pos[i + 1, j] = state[j]
                tt[i + 1, j] = state[3 + j]
                nn[i + 1, j] = state[6 + j]
                bb[i + 1, j] = state[9 + j]
    return pos_arr, t_arr, n_arr, b_arr, drift_arr, status, err_step


cdef inline void _frame_rhs(double* st, double kappa, double tau,
                            double* out) nogil:
    cdef Py_ssize_t j
    for j in range(3):
        out[j] = st[3 + j]
        out[3 + j] = kappa * st[6 + j]
        out[6 + j] = -kappa * st[3 + j] + tau * st[9 + j]
        out[9 + j] = -tau * st[6 + j]


cdef inline double _dot3(double* st, Py_ssize_t o1, Py_ssize_t o2) nogil:
    return st[o1] * st[o2] + st[o1 + 1] * st[o2 + 1] + st[o1 + 2] * st[o2 + 2]


def rk4_linear3(double[:, :, ::1] mats_st, double[::1] v0, double h):
    """Integrate dV/ds = A(s) V with stage-sampled A matrices."""
    cdef Py_ssize_t n_steps = (mats_st.shape[0] - 1) // 2
    out_arr = np.empty((n_steps + 1, 3), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double v[3]
    cdef double tmp[3]
    cdef double ka[3]
    cdef double kb[3]
    cdef double kc[3]
    cdef double kd[3]
    cdef Py_ssize_t i, j
    for j in range(3):
        v[j] = v0[j]
        out[0, j] = v[j]
    with nogil:
        for i in range(n_steps):
            _matvec(mats_st, 2 * i, v, ka)
            for j in range(3):
                tmp[j] = v[j] + 0.5 * h * ka[j]
            _matvec(mats_st, 2 * i + 1, tmp, kb)
            for j in range(3):
                tmp[j] = v[j] + 0.5 * h * kb[j]
            _matvec(mats_st, 2 * i + 1, tmp, kc)
            for j in range(3):
                tmp[j] = v[j] + h * kc[j]
            _matvec(mats_st, 2 * i + 2, tmp, kd)
            for j in range(3):
                v[j] = v[j] + (h / 6.0) * (ka[j] + 2.0 * kb[j] + 2.0 * kc[j] + kd[j])
                out[i + 1, j] = v[j]
    return out_arr


cdef inline void _matvec(double[:, :, ::1] mats, Py_ssize_t idx, double* x,
                         double* out) nogil:
    cdef Py_ssize_t r
    for r in range(3):
        out[r] = mats[idx, r, 0] * x[0] + mats[idx, r, 1] * x[1] + mats[idx, r, 2] * x[2]
