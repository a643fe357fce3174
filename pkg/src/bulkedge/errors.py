"""Exception types shared across the package."""


class BulkEdgeError(Exception):
    """Base class for all package errors."""


class SizeLimitError(BulkEdgeError):
    """Requested object exceeds the supported desk-scale size."""


class StructureError(BulkEdgeError):
    """Operands are structurally incompatible (dimension, cocycle, sample space)."""


class ConfigError(BulkEdgeError):
    """Invalid experiment configuration; message names the offending field."""


class GapClosedError(BulkEdgeError):
    """Spectrum reaches into the protected window around the chemical potential."""

    def __init__(self, message, offending_eigenvalue=None):
        super().__init__(message)
        self.offending_eigenvalue = offending_eigenvalue


class InconclusiveIndexError(BulkEdgeError):
    """Finite-size data does not support a confident integer / parity readout."""


class SymmetryError(BulkEdgeError):
    """A declared symmetry constraint is violated by the data."""


class OracleRefusal(BulkEdgeError):
    """Oracle preconditions not met (e.g. disordered input to a clean-only oracle)."""


class WindowError(BulkEdgeError):
    """Spectral or spatial window is invalid for the requested computation."""
