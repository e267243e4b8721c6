"""Exception types shared across the package."""


class CpwkitError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgument(CpwkitError, ValueError):
    """A precondition on user-supplied values was violated."""


class IncompatibleNetworks(CpwkitError, ValueError):
    """Operands differ in sweep, reference impedance, or port count."""


class DegenerateNetwork(CpwkitError, ValueError):
    """A conversion or solve is singular at one or more frequencies."""

    def __init__(self, message: str, frequency_hz: float | None = None):
        if frequency_hz is not None:
            message = f"{message} (at {frequency_hz:.6g} Hz)"
        super().__init__(message)
        self.frequency_hz = frequency_hz


class AmbiguousReflect(CpwkitError, ValueError):
    """TRL reflect standard disagrees with its nominal kind by more than 90 degrees."""


class NoSolution(CpwkitError, RuntimeError):
    """A root-find or fit could not bracket/settle a solution in its allowed range."""


class TouchstoneParseError(CpwkitError, ValueError):
    """Malformed Touchstone input; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class NetlistError(CpwkitError, ValueError):
    """Netlist failed schema or connectivity validation; carries a document path."""

    def __init__(self, message: str, path: str | None = None):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
