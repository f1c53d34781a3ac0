"""Forward-mode dual numbers and univariate order-2 jets.

DualNumber carries a value plus a triple of first partials (one slot per
active variable); Jet2 carries (f, f', f'') along a single parameter. Both
accept scalar or 1-d ndarray components so the pure-Python kernel can walk an
expression tape with whole grids in the registers.

The chain-rule table here is the reference implementation; the compiled
kernel in ``_core.pyx`` mirrors it and must be kept in sync.
"""

import numpy as np

from .errors import DomainError

_N_PARTIALS = 3


def _scale(a, d):
    # multiply scalar-or-(n,) a onto partials d of shape (3,) or (n, 3)
    a = np.asarray(a)
    if a.ndim == 0:
        return a * d
    return a[:, None] * d


def _first_bad(mask):
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return 0
    return int(np.argmax(mask))


def check_div(denom):
    if np.any(denom == 0.0):
        raise DomainError("division by zero", bad_index=_first_bad(denom == 0.0))


def check_log(value):
    if np.any(value <= 0.0):
        raise DomainError(
            "log of a non-positive value", bad_index=_first_bad(value <= 0.0)
        )


def check_sqrt(value):
    if np.any(value < 0.0):
        raise DomainError(
            "sqrt of a negative value", bad_index=_first_bad(value < 0.0)
        )


def check_atan2(y, x):
    bad = (y == 0.0) & (x == 0.0)
    if np.any(bad):
        raise DomainError("atan2 at the origin", bad_index=_first_bad(bad))


def check_pow(base, expo):
    # real-valued semantics: negative base needs an integral exponent,
    # zero base needs a positive one (0^0 = 1 is allowed).
    neg = (base < 0.0) & (expo != np.floor(expo))
    if np.any(neg):
        raise DomainError(
            "negative base with non-integer exponent", bad_index=_first_bad(neg)
        )
    zero = (base == 0.0) & (expo < 0.0)
    if np.any(zero):
        raise DomainError("zero base with negative exponent",
                          bad_index=_first_bad(zero))


def check_finite(*parts):
    for part in parts:
        if not np.all(np.isfinite(part)):
            raise DomainError(
                "non-finite value", bad_index=_first_bad(~np.isfinite(part))
            )


class DualNumber:
    """value + first partials with respect to up to three active variables."""

    __slots__ = ("value", "partials")

    def __init__(self, value, partials=None):
        self.value = np.asarray(value, dtype=float)
        if partials is None:
            shape = self.value.shape + (_N_PARTIALS,)
            partials = np.zeros(shape)
        self.partials = np.asarray(partials, dtype=float)

    @classmethod
    def variable(cls, value, slot):
        """Seed a dual for an active variable occupying derivative slot 0..2."""
        d = cls(value)
        d.partials[..., slot] = 1.0
        return d

    def __repr__(self):
        return f"DualNumber({self.value!r}, {self.partials!r})"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, DualNumber):
            return other
        return DualNumber(np.asarray(other, dtype=float) * np.ones_like(self.value))

    def __add__(self, other):
        other = self._coerce(other)
        return DualNumber(self.value + other.value, self.partials + other.partials)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return DualNumber(self.value - other.value, self.partials - other.partials)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        other = self._coerce(other)
        return DualNumber(
            self.value * other.value,
            _scale(other.value, self.partials) + _scale(self.value, other.partials),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        check_div(other.value)
        value = self.value / other.value
        numer = self.partials - _scale(value, other.partials)
        return DualNumber(value, _scale(1.0 / other.value, numer))

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __neg__(self):
        return DualNumber(-self.value, -self.partials)


def d_sin(u):
    return DualNumber(np.sin(u.value), _scale(np.cos(u.value), u.partials))


def d_cos(u):
    return DualNumber(np.cos(u.value), _scale(-np.sin(u.value), u.partials))


def d_tan(u):
    t = np.tan(u.value)
    return DualNumber(t, _scale(1.0 + t * t, u.partials))


def d_exp(u):
    e = np.exp(u.value)
    return DualNumber(e, _scale(e, u.partials))


def d_log(u):
    check_log(u.value)
    return DualNumber(np.log(u.value), _scale(1.0 / u.value, u.partials))


def d_sqrt(u):
    check_sqrt(u.value)
    r = np.sqrt(u.value)
    return DualNumber(r, _scale(0.5 / r, u.partials))


def d_abs(u):
    return DualNumber(np.abs(u.value), _scale(np.sign(u.value), u.partials))


def d_atan2(y, x):
    check_atan2(y.value, x.value)
    q = x.value * x.value + y.value * y.value
    return DualNumber(
        np.arctan2(y.value, x.value),
        _scale(x.value / q, y.partials) - _scale(y.value / q, x.partials),
    )


def d_pow(u, w):
    """General u**w: d(u^w) = u^w (w' ln u + w u'/u)."""
    check_pow(u.value, w.value)
    value = np.power(u.value, w.value)
    # the log term only exists where the exponent actually varies
    if np.any(w.partials != 0.0):
        check_log(u.value)
        logu = np.log(u.value)
        deriv = _scale(value * logu, w.partials) + _scale(
            w.value * np.power(u.value, w.value - 1.0), u.partials
        )
    else:
        deriv = _scale(w.value * np.power(u.value, w.value - 1.0), u.partials)
    return DualNumber(value, deriv)


def d_powi(u, n):
    """Integer power, valid for negative bases."""
    if n < 0:
        check_div(u.value)
    value = np.power(u.value, float(n))
    if n == 0:
        return DualNumber(np.ones_like(u.value) * 1.0, np.zeros_like(u.partials))
    deriv = _scale(n * np.power(u.value, float(n - 1)), u.partials)
    return DualNumber(value, deriv)


class Jet2:
    """Truncated Taylor jet (f, f', f'') along one parameter."""

    __slots__ = ("f", "d1", "d2")

    def __init__(self, f, d1=None, d2=None):
        self.f = np.asarray(f, dtype=float)
        self.d1 = np.zeros_like(self.f) if d1 is None else np.asarray(d1, dtype=float)
        self.d2 = np.zeros_like(self.f) if d2 is None else np.asarray(d2, dtype=float)

    @classmethod
    def variable(cls, value, seed=1.0):
        return cls(value, seed * np.ones_like(np.asarray(value, dtype=float)), None)

    def __repr__(self):
        return f"Jet2({self.f!r}, {self.d1!r}, {self.d2!r})"

    def _coerce(self, other):
        if isinstance(other, Jet2):
            return other
        return Jet2(np.asarray(other, dtype=float) * np.ones_like(self.f))

    def __add__(self, other):
        other = self._coerce(other)
        return Jet2(self.f + other.f, self.d1 + other.d1, self.d2 + other.d2)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Jet2(self.f - other.f, self.d1 - other.d1, self.d2 - other.d2)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        other = self._coerce(other)
        return Jet2(
            self.f * other.f,
            self.d1 * other.f + self.f * other.d1,
            self.d2 * other.f + 2.0 * self.d1 * other.d1 + self.f * other.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        check_div(other.f)
        w = self.f / other.f
        w1 = (self.d1 - w * other.d1) / other.f
        w2 = (self.d2 - 2.0 * w1 * other.d1 - w * other.d2) / other.f
        return Jet2(w, w1, w2)

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __neg__(self):
        return Jet2(-self.f, -self.d1, -self.d2)


def j_sin(u):
    s, c = np.sin(u.f), np.cos(u.f)
    return Jet2(s, c * u.d1, c * u.d2 - s * u.d1 * u.d1)


def j_cos(u):
    s, c = np.sin(u.f), np.cos(u.f)
    return Jet2(c, -s * u.d1, -s * u.d2 - c * u.d1 * u.d1)


def j_tan(u):
    t = np.tan(u.f)
    sec2 = 1.0 + t * t
    return Jet2(t, sec2 * u.d1, sec2 * u.d2 + 2.0 * t * sec2 * u.d1 * u.d1)


def j_exp(u):
    e = np.exp(u.f)
    return Jet2(e, e * u.d1, e * (u.d2 + u.d1 * u.d1))


def j_log(u):
    check_log(u.f)
    r = u.d1 / u.f
    return Jet2(np.log(u.f), r, u.d2 / u.f - r * r)


def j_sqrt(u):
    check_sqrt(u.f)
    r = np.sqrt(u.f)
    r1 = u.d1 / (2.0 * r)
    return Jet2(r, r1, (u.d2 - 2.0 * r1 * r1) / (2.0 * r))


def j_abs(u):
    sgn = np.sign(u.f)
    return Jet2(np.abs(u.f), sgn * u.d1, sgn * u.d2)


def j_atan2(y, x):
    check_atan2(y.f, x.f)
    q = x.f * x.f + y.f * y.f
    th1 = (x.f * y.d1 - y.f * x.d1) / q
    q1 = 2.0 * (x.f * x.d1 + y.f * y.d1)
    th2 = (x.f * y.d2 - y.f * x.d2) / q - th1 * q1 / q
    return Jet2(np.arctan2(y.f, x.f), th1, th2)


def j_pow(u, w):
    check_pow(u.f, w.f)
    if np.any(w.d1 != 0.0) or np.any(w.d2 != 0.0):
        # u^w = exp(w ln u); compose through the existing tables
        return j_exp(w * j_log(u))
    value = np.power(u.f, w.f)
    p1 = w.f * np.power(u.f, w.f - 1.0)
    p2 = w.f * (w.f - 1.0) * np.power(u.f, w.f - 2.0)
    return Jet2(value, p1 * u.d1, p2 * u.d1 * u.d1 + p1 * u.d2)


def j_powi(u, n):
    if n < 0:
        check_div(u.f)
    if n == 0:
        one = np.ones_like(u.f)
        return Jet2(one, np.zeros_like(u.f), np.zeros_like(u.f))
    value = np.power(u.f, float(n))
    p1 = n * np.power(u.f, float(n - 1))
    p2 = n * (n - 1) * np.power(u.f, float(n - 2)) if n != 1 else np.zeros_like(u.f)
    return Jet2(value, p1 * u.d1, p2 * u.d1 * u.d1 + p1 * u.d2)
