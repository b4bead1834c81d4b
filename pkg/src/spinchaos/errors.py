"""Exception types shared across the package.

The command-line driver maps these onto exit codes: ConfigError -> 2,
NumericsError (and subclasses) -> 3, ResourceError -> 4.
"""


class SpinChaosError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SpinChaosError):
    """Malformed or inconsistent run configuration."""


class NumericsError(SpinChaosError):
    """A numeric contract was violated or the data cannot support the request."""


class ResourceError(SpinChaosError):
    """The requested sector exceeds the configured resource cap."""


class SectorError(NumericsError):
    """Invalid (N, sz) sector or basis misuse."""


class SymmetryError(NumericsError):
    """Operator does not commute with the assumed symmetry."""


class GeometryError(NumericsError):
    """Degenerate spin geometry (coincident sites, zero field axis...)."""


class SmoothingError(NumericsError):
    """Kernel smoothing produced unusable output (degenerate support, f <= 0)."""


class InsufficientDataError(NumericsError):
    """Too few levels/spacings/values for the requested statistic."""


class SelectionEmptyError(NumericsError):
    """Component selection filters left nothing to sample."""
