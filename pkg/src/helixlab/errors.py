"""Exception hierarchy for helixlab.

Every failure mode the toolkit reports deliberately (as opposed to plain
programming errors) derives from HelixlabError so callers can catch one base.
"""


class HelixlabError(Exception):
    """Base class for all helixlab errors."""


class SingularMetric(HelixlabError):
    """Metric is not usably positive definite at a queried point."""


class NonFiniteValue(HelixlabError):
    """A NaN or Inf tried to escape an operation."""


class DegenerateFrame(HelixlabError):
    """Curvature below the frame floor: the Frenet frame is undefined."""


class IrregularCurve(HelixlabError):
    """Curve speed vanishes (or nearly so) somewhere on the domain."""


class TooFewSamples(HelixlabError):
    """Sampled curve has fewer points than the differentiation stencil needs."""


class NonMonotoneParameter(HelixlabError):
    """Sampled curve parameter values are not strictly increasing."""


class EmptyGrid(HelixlabError):
    """A constancy/classification grid has fewer than two values."""


class NotSlantHelix(HelixlabError):
    """Axis reconstruction requested for a pair that is not a slant helix."""


class NonPositiveW(HelixlabError):
    """Constant-precession amplitude w must be positive."""


class NonOrthonormalInitialFrame(HelixlabError):
    """Initial frame handed to the integrator is not orthonormal."""


class StepTooLarge(HelixlabError):
    """Frame drift exceeded the per-step bound before re-orthonormalization."""


class AxisFitFailed(HelixlabError):
    """Constant-axis fit residual too large; integration is suspect."""


class InvalidProfile(HelixlabError):
    """Curvature/torsion profile violates its contract (kappa < 0, bad step...)."""


class ExprError(HelixlabError):
    """Base class for expression-language errors."""


class ExprSyntaxError(ExprError):
    """Parse failure; carries the byte offset and what was expected."""

    def __init__(self, message, offset, expected=None):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UnknownIdentifier(ExprError):
    """Identifier is not a variable, function, or bound constant."""

    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier '{name}' at offset {offset}")


class DomainError(ExprError):
    """Evaluation left the real domain (log<=0, sqrt<0, division by zero...).

    ``subexpr`` is the offending subexpression's source text when known;
    ``bad_index`` is the index of the offending evaluation point in a batch.
    """

    def __init__(self, message, subexpr=None, offset=None, bad_index=None):
        self.subexpr = subexpr
        self.offset = offset
        self.bad_index = bad_index
        detail = message
        if subexpr is not None:
            detail += f" in '{subexpr}'"
        if offset is not None:
            detail += f" (offset {offset})"
        super().__init__(detail)


class ConfigError(HelixlabError):
    """Run configuration is invalid; carries the offending key path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class UnknownSeries(HelixlabError):
    """Requested plot series does not exist; lists the available names."""

    def __init__(self, name, available):
        self.name = name
        self.available = tuple(available)
        super().__init__(
            f"unknown series '{name}'; available: {', '.join(self.available)}"
        )
