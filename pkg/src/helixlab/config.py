"""Run configuration: flat key-value text with dotted sections.

Documented in docs/config.md. Example::

    # Example 2.1
    metric.preset = euclidean
    curve.x = t/sqrt(2)
    curve.y = cos(t/sqrt(2))
    curve.z = sin(t/sqrt(2))
    curve.t_min = 0
    curve.t_max = 17.7715
    field.f = x + y^2 + z^2
    grid.count = 1024

Exactly one curve source (expressions, CSV, or generator) must be present.
"""

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curves import (
    ParamCurve,
    SampledCurve,
    arclength_reparametrize,
    curve_from_samples,
)
from .errors import ConfigError, HelixlabError
from .frenet import KAPPA_MIN
from .generate import (
    ProfileSpec,
    constant_precession_profile,
    integrate_frenet,
    precession_fixture,
)
from .manifold import MetricField, ScalarField

_METRIC_PRESETS = ("euclidean", "half_space")
_METRIC_ENTRIES = tuple(
    f"g{i}{j}" for i in range(1, 4) for j in range(1, 4)
)
_KNOWN_KEYS = {
    "metric.preset",
    *(f"metric.{e}" for e in _METRIC_ENTRIES),
    "curve.x",
    "curve.y",
    "curve.z",
    "curve.t_min",
    "curve.t_max",
    "curve.csv",
    "curve.order",
    "curve.generator",
    "curve.w",
    "curve.mu",
    "curve.kappa",
    "curve.tau",
    "curve.length",
    "curve.step",
    "curve.phase_margin",
    "field.f",
    "grid.count",
    "tol.constancy",
    "tol.affine",
    "tol.theorem",
    "verify.mu",
}

MIN_GRID = 32


def parse_config_text(text):
    """Parse flat key-value lines into an ordered dict of strings."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected KEY = VALUE, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key.startswith("const.") and key not in _KNOWN_KEYS:
            raise ConfigError(key, "unknown configuration key")
        if key in values:
            raise ConfigError(key, "duplicate key")
        values[key] = value
    return values


def _get_float(values, key, default=None):
    if key not in values:
        if default is None:
            raise ConfigError(key, "required numeric value missing")
        return default
    try:
        return float(values[key])
    except ValueError:
        raise ConfigError(key, f"not a number: {values[key]!r}") from None


def _get_int(values, key, default):
    if key not in values:
        return default
    try:
        return int(values[key])
    except ValueError:
        raise ConfigError(key, f"not an integer: {values[key]!r}") from None


@dataclass
class RunConfig:
    """Validated configuration plus the raw key-value echo for reports."""

    raw: dict
    metric: MetricField
    curve_source: str  # expressions | csv | generator:precession | generator:profile
    field_expr: Optional[str]
    grid_count: int
    constancy_tol: Optional[float]  # None = per-source default
    affine_tol: float
    theorem_tol: float
    mu_override: Optional[float]
    constants: dict
    _curve_spec: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text):
        values = parse_config_text(text)
        constants = {}
        for key, val in values.items():
            if key.startswith("const."):
                name = key[len("const."):]
                if not name.isidentifier():
                    raise ConfigError(key, "constant name must be an identifier")
                try:
                    constants[name] = float(val)
                except ValueError:
                    raise ConfigError(key, f"not a number: {val!r}") from None

        # metric
        preset = values.get("metric.preset")
        entries = {e: values[f"metric.{e}"] for e in _METRIC_ENTRIES
                   if f"metric.{e}" in values}
        if preset and entries:
            raise ConfigError("metric.preset",
                              "give a preset or explicit entries, not both")
        if preset:
            if preset == "euclidean":
                metric = MetricField.euclidean()
            elif preset == "half_space":
                metric = MetricField.half_space()
            else:
                raise ConfigError(
                    "metric.preset",
                    f"unknown preset {preset!r}; choose from {_METRIC_PRESETS}",
                )
        elif entries:
            diag = {"g11", "g22", "g33"}
            missing = diag - set(entries)
            if missing:
                raise ConfigError("metric." + sorted(missing)[0],
                                  "diagonal metric entries are required")
            try:
                metric = MetricField.from_expressions(entries, constants=constants)
            except (HelixlabError, ValueError) as exc:
                raise ConfigError("metric", str(exc)) from None
        else:
            metric = MetricField.euclidean()

        # curve source (exactly one)
        sources = []
        if any(k in values for k in ("curve.x", "curve.y", "curve.z")):
            sources.append("expressions")
        if "curve.csv" in values:
            sources.append("csv")
        if "curve.generator" in values:
            sources.append("generator")
        if len(sources) != 1:
            raise ConfigError(
                "curve",
                f"exactly one curve source required, found {sources or 'none'}",
            )
        source = sources[0]
        spec = {}
        if source == "expressions":
            for key in ("curve.x", "curve.y", "curve.z"):
                if key not in values:
                    raise ConfigError(key, "curve expression missing")
                spec[key.split(".")[1]] = values[key]
            spec["t_min"] = _get_float(values, "curve.t_min")
            spec["t_max"] = _get_float(values, "curve.t_max")
            if spec["t_max"] <= spec["t_min"]:
                raise ConfigError("curve.t_max", "t_max must exceed t_min")
        elif source == "csv":
            spec["path"] = values["curve.csv"]
            spec["order"] = _get_int(values, "curve.order", 3)
        else:
            kind = values["curve.generator"]
            if kind == "precession":
                spec["w"] = _get_float(values, "curve.w")
                spec["mu"] = _get_float(values, "curve.mu")
                spec["length"] = (
                    _get_float(values, "curve.length")
                    if "curve.length" in values else None
                )
                spec["phase_margin"] = _get_float(values, "curve.phase_margin", 0.2)
            elif kind == "profile":
                for key in ("curve.kappa", "curve.tau"):
                    if key not in values:
                        raise ConfigError(key, "profile expression missing")
                spec["kappa"] = values["curve.kappa"]
                spec["tau"] = values["curve.tau"]
                spec["length"] = _get_float(values, "curve.length")
            else:
                raise ConfigError(
                    "curve.generator",
                    f"unknown generator {kind!r}; choose precession or profile",
                )
            spec["step"] = (
                _get_float(values, "curve.step") if "curve.step" in values else None
            )
            source = f"generator:{kind}"

        grid_count = _get_int(values, "grid.count", 1024)
        if grid_count < MIN_GRID:
            raise ConfigError("grid.count", f"grid count must be >= {MIN_GRID}")

        constancy = (
            _get_float(values, "tol.constancy")
            if "tol.constancy" in values else None
        )
        affine = _get_float(values, "tol.affine", 1e-6)
        theorem = _get_float(values, "tol.theorem", 1e-4)
        mu_override = (
            _get_float(values, "verify.mu") if "verify.mu" in values else None
        )

        return cls(
            raw=values,
            metric=metric,
            curve_source=source,
            field_expr=values.get("field.f"),
            grid_count=grid_count,
            constancy_tol=constancy,
            affine_tol=affine,
            theorem_tol=theorem,
            mu_override=mu_override,
            constants=constants,
            _curve_spec=spec,
        )

    # -- materialization ------------------------------------------------------

    def build_field(self):
        if self.field_expr is None:
            return None
        try:
            return ScalarField.from_expression(self.field_expr,
                                               constants=self.constants)
        except HelixlabError as exc:
            raise ConfigError("field.f", str(exc)) from None

    def build_curve(self):
        """Returns (curve, analysis_grid, prescribed_profile, derived_field).

        ``derived_field`` is the precession fixture's axis field, available
        when no explicit field.f is configured.
        """
        spec = self._curve_spec
        if self.curve_source == "expressions":
            try:
                curve = ParamCurve.from_expressions(
                    spec["x"], spec["y"], spec["z"],
                    (spec["t_min"], spec["t_max"]),
                    constants=self.constants,
                )
                unit = arclength_reparametrize(curve, self.metric)
            except HelixlabError as exc:
                raise ConfigError("curve", str(exc)) from None
            grid = np.linspace(0.0, unit.length, self.grid_count)
            return unit, grid, None, None
        if self.curve_source == "csv":
            try:
                with open(spec["path"], newline="") as fh:
                    t, pts = read_curve_csv(fh)
                samples = SampledCurve(t, pts, order=spec["order"])
                unit = arclength_reparametrize(
                    curve_from_samples(samples), self.metric
                )
            except OSError as exc:
                raise ConfigError("curve.csv", str(exc)) from None
            except HelixlabError as exc:
                raise ConfigError("curve.csv", str(exc)) from None
            grid = np.linspace(0.0, unit.length, self.grid_count)
            return unit, grid, None, None
        if self.curve_source == "generator:precession":
            if spec["length"] is None:
                fixture = precession_fixture(
                    spec["w"], spec["mu"], step=spec["step"],
                    grid_count=self.grid_count,
                    phase_margin=spec["phase_margin"],
                )
                profile = constant_precession_profile(
                    spec["w"], spec["mu"], step=spec["step"]
                )
                return fixture.curve, fixture.grid, profile, fixture.field
            profile = constant_precession_profile(
                spec["w"], spec["mu"], length=spec["length"], step=spec["step"]
            )
            unit = integrate_frenet(profile)
            grid = self._profile_grid(profile, unit)
            return unit, grid, profile, None
        # generator:profile
        profile = ProfileSpec(
            spec["kappa"], spec["tau"], spec["length"], step=spec["step"],
            constants=self.constants,
        )
        unit = integrate_frenet(profile)
        grid = self._profile_grid(profile, unit)
        return unit, grid, profile, None

    def _profile_grid(self, profile, unit):
        """Analysis grid over the curve, avoiding kappa <= kappa_min points."""
        candidate = np.linspace(0.0, unit.length, 4 * self.grid_count)
        kappa, _ = profile.eval_batch(candidate)
        ok = np.abs(kappa) > max(KAPPA_MIN, 1e-3 * np.max(np.abs(kappa)))
        if not np.any(ok):
            raise ConfigError("curve.generator",
                              "profile curvature vanishes on the whole domain")
        # largest contiguous usable window
        best_lo, best_hi, lo = 0, -1, None
        for i, flag in enumerate(ok):
            if flag and lo is None:
                lo = i
            if (not flag or i == len(ok) - 1) and lo is not None:
                hi = i if flag else i - 1
                if hi - lo > best_hi - best_lo:
                    best_lo, best_hi = lo, hi
                lo = None
        return np.linspace(candidate[best_lo], candidate[best_hi], self.grid_count)

    def default_constancy_tol(self):
        if self.constancy_tol is not None:
            return self.constancy_tol
        return 1e-6 if self.curve_source == "expressions" else 1e-3


# ---------------------------------------------------------------------------
# Curve CSV format: header "t,x,y,z", LF endings, plain decimal floats


def read_curve_csv(fh):
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError("curve.csv", "empty CSV file") from None
    if [h.strip() for h in header] != ["t", "x", "y", "z"]:
        raise ConfigError(
            "curve.csv", f"expected header 't,x,y,z', got {','.join(header)!r}"
        )
    t, pts = [], []
    for row in reader:
        if not row:
            continue
        if len(row) != 4:
            raise ConfigError("curve.csv", f"expected 4 columns, got {row!r}")
        try:
            vals = [float(v) for v in row]
        except ValueError:
            raise ConfigError("curve.csv", f"bad number in row {row!r}") from None
        t.append(vals[0])
        pts.append(vals[1:])
    return np.asarray(t), np.asarray(pts)


def write_curve_csv(fh, t, points):
    out = io.StringIO()
    out.write("t,x,y,z\n")
    for ti, p in zip(t, points):
        out.write(
            f"{format(ti, '.17g')},{format(p[0], '.17g')},"
            f"{format(p[1], '.17g')},{format(p[2], '.17g')}\n"
        )
    fh.write(out.getvalue())
