"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class HarmwebError(Exception):
    exit_code = 1


class UsageError(HarmwebError, ValueError):
    """Malformed input or out-of-range argument."""

    exit_code = 64


class NumericalError(HarmwebError, RuntimeError):
    """A numeric procedure (root finding, tracing, continuation) gave up."""

    exit_code = 2


class RootFindingError(NumericalError):
    pass


class TraceError(NumericalError):
    pass


class NonGenericError(TraceError):
    """The polynomial sits too close to a stratum wall to classify reliably."""


class OracleMismatch(HarmwebError):
    exit_code = 3

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionError(HarmwebError, ValueError):
    """An operation refused its input (non-free action, bad base set, ...)."""

    exit_code = 4

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DiagramError(HarmwebError, ValueError):
    """A chord diagram violates one of its structural invariants."""
