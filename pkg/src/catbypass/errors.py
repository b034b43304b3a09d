"""Exception types shared across the package."""


class CatBypassError(Exception):
    """Base class for all package errors."""


class LayoutError(CatBypassError):
    """Subsystem index out of range or incompatible mode/ancilla layouts."""


class TruncationError(CatBypassError):
    """Fock-space truncation too small for the requested amplitudes."""


class ContractError(CatBypassError):
    """An operator violated a required property (e.g. non-Hermitian input)."""


class DegenerateBasisError(CatBypassError):
    """All Gram singular values fell below the rank tolerance."""


class ProjectionError(CatBypassError):
    """A measurement projection has (numerically) zero success probability."""


class ConfigError(CatBypassError):
    """Invalid or inconsistent sweep configuration."""
