"""Frenet apparatus, Darboux vectors, and the slant-helix invariant.

The frame at arc length s follows the sign conventions of the Frenet system
under the Levi-Civita connection: T = alpha'(s), N = (nabla_T T)/kappa with
kappa > 0, B = cross(T, N) through the metric volume form, and
tau = g(nabla_T N, B). nabla_T N is obtained by one covariant differentiation
of the already-computed normal (second-order stencil in s) rather than a
third-derivative formula.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DegenerateFrame, EmptyGrid, NonFiniteValue
from .manifold import christoffel_b, cross_b, inner_b, norm_b

KAPPA_MIN = 1e-8
_BASE_STEP = 1e-5


@dataclass(frozen=True)
class FrenetSample:
    """Frenet data at one arc-length value."""

    s: float
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float
    W: np.ndarray
    W0: np.ndarray


class FrenetSeries:
    """Frenet data over an s-grid, stored struct-of-arrays."""

    def __init__(self, s, T, N, B, kappa, tau):
        self.s = s
        self.T = T
        self.N = N
        self.B = B
        self.kappa = kappa
        self.tau = tau
        nu = np.sqrt(kappa**2 + tau**2)
        self.W = tau[:, None] * T + kappa[:, None] * B
        self.W0 = (tau / nu)[:, None] * T + (kappa / nu)[:, None] * B

    def __len__(self):
        return len(self.s)

    def sample(self, i):
        return FrenetSample(
            s=float(self.s[i]),
            T=self.T[i].copy(),
            N=self.N[i].copy(),
            B=self.B[i].copy(),
            kappa=float(self.kappa[i]),
            tau=float(self.tau[i]),
            W=self.W[i].copy(),
            W0=self.W0[i].copy(),
        )

    @property
    def kappa2_plus_tau2(self):
        return self.kappa**2 + self.tau**2


def _frames_raw(curve, metric, s_arr, kappa_min):
    """Positions, frames, and curvature at the given arc lengths."""
    pos, a1, a2 = curve.jets_batch(s_arr)
    g = metric.eval_batch(pos)
    if metric.is_constant:
        acc = a2
    else:
        gam = christoffel_b(metric, pos)
        acc = a2 + np.einsum("nkij,ni,nj->nk", gam, a1, a1)
    kappa = norm_b(g, acc)
    low = kappa < kappa_min
    if np.any(low):
        i = int(np.argmax(low))
        raise DegenerateFrame(
            f"curvature {kappa[i]:.3g} below {kappa_min:.1g} at s = {s_arr[i]:.6g}; "
            "the Frenet frame is undefined"
        )
    nrm = acc / kappa[:, None]
    binorm = cross_b(g, a1, nrm)
    return pos, a1, nrm, binorm, kappa, g


def _stencil_step(curve, s_arr):
    step = _BASE_STEP * np.maximum(1.0, np.abs(s_arr))
    spacing = getattr(getattr(curve, "curve", None), "sample_spacing", None)
    if spacing is not None:
        step = np.maximum(step, 2.0 * spacing)
    return step


def _series_chunk(curve, metric, s_arr, kappa_min, step):
    if step is None:
        delta = _stencil_step(curve, s_arr)
    else:
        delta = np.full_like(s_arr, float(step))
    s_lo, s_hi = curve.domain
    left = s_arr - delta < s_lo
    right = s_arr + delta > s_hi
    center = ~(left | right)

    sh1 = np.where(center, s_arr - delta, np.where(left, s_arr + delta, s_arr - delta))
    sh2 = np.where(
        center, s_arr + delta, np.where(left, s_arr + 2 * delta, s_arr - 2 * delta)
    )
    # second-order stencil coefficients for dN/ds at s
    inv = 1.0 / (2.0 * delta)
    c0 = np.where(center, 0.0, np.where(left, -3.0, 3.0)) * inv
    c1 = np.where(center, -1.0, np.where(left, 4.0, -4.0)) * inv
    c2 = np.where(center, 1.0, np.where(left, -1.0, 1.0)) * inv

    pos, tang, nrm, binorm, kappa, g = _frames_raw(curve, metric, s_arr, kappa_min)
    _, _, nrm1, _, _, _ = _frames_raw(curve, metric, sh1, kappa_min)
    _, _, nrm2, _, _, _ = _frames_raw(curve, metric, sh2, kappa_min)

    dn = c0[:, None] * nrm + c1[:, None] * nrm1 + c2[:, None] * nrm2
    if metric.is_constant:
        cov_dn = dn
    else:
        gam = christoffel_b(metric, pos)
        cov_dn = dn + np.einsum("nkij,ni,nj->nk", gam, tang, nrm)
    tau = inner_b(g, cov_dn, binorm)
    return pos, tang, nrm, binorm, kappa, tau


def frenet_series(curve, metric, s_grid, kappa_min=KAPPA_MIN, step=None):
    """Frenet apparatus over an arc-length grid (the analysis workhorse)."""
    s_grid = np.atleast_1d(np.asarray(s_grid, dtype=float))
    if s_grid.size == 0:
        raise EmptyGrid("empty arc-length grid")

    def chunk(s_arr):
        return _series_chunk(curve, metric, s_arr, kappa_min, step)

    pos, tang, nrm, binorm, kappa, tau = backend.parallel_map_chunks(
        chunk, (s_grid,), 6
    )
    if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(kappa))):
        raise NonFiniteValue("Frenet series produced non-finite curvatures")
    return FrenetSeries(s_grid, tang, nrm, binorm, kappa, tau)


def frenet_apparatus(curve, metric, s, kappa_min=KAPPA_MIN, step=None):
    """Frenet sample (T, N, B, kappa, tau, W, W0) at one arc length."""
    series = frenet_series(curve, metric, np.array([float(s)]), kappa_min, step)
    return series.sample(0)


def darboux(sample):
    """Darboux vector W = tau T + kappa B in chart components."""
    return sample.tau * sample.T + sample.kappa * sample.B


def unit_darboux(sample):
    """Unit Darboux vector W0 = (tau T + kappa B) / sqrt(kappa^2 + tau^2)."""
    nu = np.hypot(sample.kappa, sample.tau)
    return (sample.tau / nu) * sample.T + (sample.kappa / nu) * sample.B


# ---------------------------------------------------------------------------
# Curvature profiles


class CurvatureProfile:
    """Grid of (s, kappa, tau) values, measured from a curve or prescribed."""

    def __init__(self, s, kappa, tau, provenance="measured",
                 kappa_min=KAPPA_MIN):
        self.s = np.asarray(s, dtype=float)
        self.kappa = np.asarray(kappa, dtype=float)
        self.tau = np.asarray(tau, dtype=float)
        self.provenance = provenance
        if self.s.ndim != 1 or self.kappa.shape != self.s.shape or (
            self.tau.shape != self.s.shape
        ):
            raise ValueError("profile arrays must share one shape (n,)")
        if np.any(np.diff(self.s) <= 0.0):
            raise ValueError("profile grid must strictly increase in s")
        if provenance == "measured" and np.any(self.kappa <= kappa_min):
            i = int(np.argmax(self.kappa <= kappa_min))
            raise DegenerateFrame(
                f"measured profile has kappa = {self.kappa[i]:.3g} at "
                f"s = {self.s[i]:.6g}"
            )

    def __len__(self):
        return len(self.s)

    @classmethod
    def from_series(cls, series):
        return cls(series.s, series.kappa, series.tau, provenance="measured")

    @property
    def kappa2_plus_tau2(self):
        return self.kappa**2 + self.tau**2


def slant_invariant_series(profile, kappa_min=KAPPA_MIN):
    """kappa^2/(kappa^2+tau^2)^(3/2) * (tau/kappa)' over the profile grid.

    (tau/kappa)' comes from second-order differences on the grid (np.gradient:
    central in the interior, one-sided at the ends).
    """
    kappa, tau = profile.kappa, profile.tau
    if np.any(kappa <= kappa_min):
        i = int(np.argmax(kappa <= kappa_min))
        raise DegenerateFrame(
            f"kappa = {kappa[i]:.3g} at s = {profile.s[i]:.6g} is below the "
            f"frame floor {kappa_min:.1g}"
        )
    ratio_rate = np.gradient(tau / kappa, profile.s, edge_order=2)
    return kappa**2 / (kappa**2 + tau**2) ** 1.5 * ratio_rate


def slant_invariant(profile, s, kappa_min=KAPPA_MIN):
    """The slant-helix invariant at a grid point of the profile."""
    idx = int(np.argmin(np.abs(profile.s - s)))
    spacing = np.min(np.diff(profile.s))
    if abs(profile.s[idx] - s) > 1e-6 * spacing:
        raise ValueError(
            f"s = {s} is not a grid point of the profile (nearest "
            f"{profile.s[idx]})"
        )
    return float(slant_invariant_series(profile, kappa_min)[idx])
