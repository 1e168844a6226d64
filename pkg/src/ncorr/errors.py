"""Exception hierarchy shared by every ncorr module.

All errors derive from :class:`NcorrError` so callers (notably the CLI) can
map families of failures onto exit codes without enumerating every class.
"""


class NcorrError(Exception):
    """Base class for all package errors."""


class ConfigError(NcorrError, ValueError):
    """A configuration value violates a documented constraint."""


class SizeError(NcorrError, ValueError):
    """A combinatorial or Monte Carlo size guard was exceeded."""


class SupportError(NcorrError, ValueError):
    """A test function's Fourier support lies outside the admissible range."""


class ParseError(NcorrError, ValueError):
    """A data file could not be parsed."""


class OrderError(NcorrError, ValueError):
    """A data set that must be strictly increasing is not."""


class NumericalError(NcorrError, ArithmeticError):
    """A numerical routine failed (conditioning, overflow, non-convergence)."""


class PoleError(NumericalError):
    """An argument falls within the pole tolerance of a singularity."""


class StripError(NumericalError):
    """A complex argument lies outside the supported horizontal strip."""


class TailError(NumericalError):
    """A truncated integrand is not small enough at the truncation point."""
