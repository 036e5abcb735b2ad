"""Exception taxonomy shared by all glasslab modules.

Every error raised on a contract violation derives from GlasslabError so
callers can catch the whole family at once.  The CLI maps ConfigInvalid to
exit code 2 and everything else to a normal traceback.
"""

__all__ = [
    "GlasslabError",
    "UnsupportedLaw",
    "QuadratureFailure",
    "SizeExceeded",
    "NonFiniteCoupling",
    "MomentMismatch",
    "IncompatibleCoupling",
    "UnsupportedModel",
    "InvalidParameter",
    "ConfigInvalid",
]


class GlasslabError(Exception):
    """Base class for all glasslab contract violations."""


class UnsupportedLaw(GlasslabError):
    """A coupling-law kind (or kind combination) has no implementation."""


class QuadratureFailure(GlasslabError):
    """A quadrature result failed its requested accuracy check."""


class SizeExceeded(GlasslabError):
    """An enumeration request exceeds the configured size limits."""


class NonFiniteCoupling(GlasslabError):
    """A disorder sample contains a NaN or infinite coupling."""


class MomentMismatch(GlasslabError):
    """A law does not satisfy the moment normalization a caller required."""


class IncompatibleCoupling(GlasslabError):
    """Two models cannot be driven by common random numbers."""


class UnsupportedModel(GlasslabError):
    """An operation does not apply to this model family."""


class InvalidParameter(GlasslabError):
    """A parameter is outside its documented domain."""


class ConfigInvalid(GlasslabError):
    """A CLI configuration failed schema or semantic validation."""
