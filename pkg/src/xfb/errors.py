"""Exception hierarchy shared by all xfb modules.

The CLI maps these onto exit codes: ValidationError and its subclasses
exit 1, NetworkError exits 3, everything else derived from XfbError
exits 2.
"""


class XfbError(Exception):
    """Base class for all errors raised by xfb."""


class ValidationError(XfbError):
    """Bad parameter, malformed config, or violated precondition."""


class DimensionError(ValidationError):
    """Array shape does not match what an operation requires."""


class ModeError(ValidationError):
    """Response granularity incompatible with the requested operation."""


class FormatError(XfbError):
    """Unreadable or corrupt artifact file (bad magic, version, truncation)."""


class DivergenceError(XfbError):
    """Training produced a non-finite loss; message names the epoch."""


class NumericError(XfbError):
    """Numerical failure (e.g. singular covariance) with remediation advice."""


class NetworkError(XfbError):
    """Prediction endpoint unreachable after retries."""
