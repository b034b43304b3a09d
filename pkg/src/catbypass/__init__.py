"""catbypass: decoherence protection of coherent-state superpositions by
qubit-ancilla bypass, with an exact coherent-dyad engine and a truncated
Fock-space oracle."""

__version__ = "0.1.0"

from . import channels, dyad, fock, harness, metrics, protocols
from .errors import (
    CatBypassError,
    ConfigError,
    ContractError,
    DegenerateBasisError,
    LayoutError,
    ProjectionError,
    TruncationError,
)
