"""Kernel backend selection.

At import time the compiled extension (``helixlab._core``) is preferred; the
pure numpy backend (``helixlab._pure``) is the fallback. Set
``HELIXLAB_BACKEND=pure`` or ``=compiled`` to force one (forcing ``compiled``
when the extension is missing raises at first use).

``HELIXLAB_THREADS`` caps thread-chunked grid evaluation used by the higher
modules; see ``parallel_map_chunks``.
"""

import os

import numpy as np

from . import _pure
from .errors import HelixlabError
from .expr import raise_status

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

_requested = os.environ.get("HELIXLAB_BACKEND", "").strip().lower()
if _requested == "pure":
    _active = _pure
elif _requested == "compiled":
    if _core is None:
        raise HelixlabError(
            "HELIXLAB_BACKEND=compiled but helixlab._core is not built"
        )
    _active = _core
else:
    _active = _core if _core is not None else _pure


def backend_name():
    return _active.name


def has_compiled():
    return _core is not None


def _as_points(points):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    return pts


def eval_values(program, points, backend=None):
    mod = backend or _active
    pts = _as_points(points)
    out, status, instr, point = mod.eval_values(
        program.ops, program.arg1, program.arg2, program.consts, pts
    )
    raise_status(program, status, instr, point)
    return np.asarray(out)


def eval_grad(program, points, seeds, backend=None):
    mod = backend or _active
    pts = _as_points(points)
    seeds = np.ascontiguousarray(seeds, dtype=np.float64)
    vals, grads, status, instr, point = mod.eval_grad(
        program.ops, program.arg1, program.arg2, program.consts, pts, seeds
    )
    raise_status(program, status, instr, point)
    return np.asarray(vals), np.asarray(grads)


def eval_jet2(program, points, seed, backend=None):
    mod = backend or _active
    pts = _as_points(points)
    seed = np.ascontiguousarray(seed, dtype=np.float64)
    f, d1, d2, status, instr, point = mod.eval_jet2(
        program.ops, program.arg1, program.arg2, program.consts, pts, seed
    )
    raise_status(program, status, instr, point)
    return np.asarray(f), np.asarray(d1), np.asarray(d2)


def rk4_frenet(kappa_st, tau_st, h, state0, drift_tol, backend=None):
    mod = backend or _active
    return mod.rk4_frenet(
        np.ascontiguousarray(kappa_st, dtype=np.float64),
        np.ascontiguousarray(tau_st, dtype=np.float64),
        float(h),
        np.ascontiguousarray(state0, dtype=np.float64),
        float(drift_tol),
    )


def rk4_linear3(mats_st, v0, h, backend=None):
    mod = backend or _active
    return np.asarray(
        mod.rk4_linear3(
            np.ascontiguousarray(mats_st, dtype=np.float64),
            np.ascontiguousarray(v0, dtype=np.float64),
            float(h),
        )
    )


def thread_count():
    """Thread cap from HELIXLAB_THREADS (default 1 = serial)."""
    raw = os.environ.get("HELIXLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map_chunks(func, arrays, n_out):
    """Apply func to row-chunks of the given arrays, preserving order.

    ``func(*chunks)`` must return a tuple of ``n_out`` arrays whose leading
    dimension matches the chunk. Chunking never changes per-point arithmetic,
    so results are bit-identical to a serial call.
    """
    n = arrays[0].shape[0]
    workers = min(thread_count(), max(1, n // 64))
    if workers <= 1:
        return func(*arrays)
    from concurrent.futures import ThreadPoolExecutor

    bounds = np.linspace(0, n, workers + 1).astype(int)
    chunks = [
        tuple(a[bounds[i]: bounds[i + 1]] for a in arrays) for i in range(workers)
    ]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda ch: func(*ch), chunks))
    return tuple(
        np.concatenate([res[j] for res in results], axis=0) for j in range(n_out)
    )
