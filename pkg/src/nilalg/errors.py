"""Error types shared across the package."""


class NilalgError(Exception):
    """Base class for everything this package raises on purpose."""


class StructuralError(NilalgError, ValueError):
    """Malformed input: bad file, bad coordinates, out-of-contract arguments."""


class NotNilpotentError(StructuralError):
    """The bracket table does not generate a nilpotent algebra."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InfeasibleSchemeError(StructuralError):
    """A higher-weight basis vector is not a combination of nested brackets of weight-one vectors."""


class SearchExhaustedError(NilalgError, RuntimeError):
    """A certified search ran out of its configured budget; carries the best bound found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class PrecisionExhaustedError(NilalgError, RuntimeError):
    """Requested certification is not reachable at the working precision; retry with more bits."""

    def __init__(self, message, suggested_bits=None):
        super().__init__(message)
        self.suggested_bits = suggested_bits
