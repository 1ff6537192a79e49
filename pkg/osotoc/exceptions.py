"""Exception hierarchy and user-facing error reporting."""

from typing import Optional, Sequence

from rich.console import Console
from rich.panel import Panel

from osotoc.logging import get_logger

logger = get_logger()


class OSOTOCError(Exception):
    """Base exception class for osotoc."""

    exit_code = 1


class ConfigError(OSOTOCError):
    """Raised when a run configuration violates the schema."""

    exit_code = 1

    def __init__(self, key: str, reason: str):
        self.key = key
        self.reason = reason
        super().__init__(f"Invalid configuration key '{key}': {reason}")


class OutputError(OSOTOCError):
    """Raised when a result file cannot be written."""

    exit_code = 1

    def __init__(self, message: str, path: str, operation: str):
        self.path = path
        self.operation = operation
        super().__init__(f"{operation} failed for {path}: {message}")


class DiskSpaceError(OutputError):
    """Raised when the output directory lacks space for a result file."""

    def __init__(self, path: str, required_bytes: int, available_bytes: int):
        self.required_bytes = required_bytes
        self.available_bytes = available_bytes
        message = (
            f"Need {required_bytes:,} bytes, but only {available_bytes:,} available"
        )
        super().__init__(message, path, "write")


class NumericalError(OSOTOCError):
    """Raised when a numerical procedure fails to reach its tolerance."""

    exit_code = 2


class QuadratureError(NumericalError):
    """Raised when adaptive quadrature does not converge."""

    def __init__(self, quantity: str, estimated_error: float, detail: str = ""):
        self.quantity = quantity
        self.estimated_error = estimated_error
        message = f"Quadrature for {quantity} did not converge"
        message += f" (estimated error {estimated_error:.3e})"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class TruncationError(NumericalError):
    """Raised when the Fock cutoff doubling gate does not converge."""

    def __init__(
        self, cutoffs: Sequence[int], deviation: Optional[float], reason: str
    ):
        self.cutoffs = tuple(cutoffs)
        self.deviation = deviation
        shown = "n/a" if deviation is None else f"{deviation:.3e}"
        super().__init__(
            f"Fock truncation not converged after cutoffs {list(self.cutoffs)} "
            f"(last deviation {shown}): {reason}"
        )


class CapabilityError(OSOTOCError):
    """Raised when a request lies outside what an engine can evaluate."""

    exit_code = 3


class DimensionCapError(CapabilityError):
    """Raised when a dense operator would exceed the dimension cap."""

    def __init__(self, dimension: int, cap: int):
        self.dimension = dimension
        self.cap = cap
        super().__init__(
            f"Hilbert-space dimension {dimension:,} exceeds the cap of {cap:,}"
        )


class NonCommutingChainError(CapabilityError):
    """Raised when the influence engine receives a non-dephasing chain."""

    def __init__(self, term: str):
        self.term = term
        super().__init__(
            f"Chain Hamiltonian does not commute with every sigma_z: {term}"
        )


class DomainError(OSOTOCError, ValueError):
    """Raised when a function is called outside its mathematical domain."""


class NonHermitianError(OSOTOCError, ValueError):
    """Raised when a generator is not Hermitian."""


class DimensionMismatchError(OSOTOCError, ValueError):
    """Raised when operator dimensions do not line up."""


class SpanMismatchError(OSOTOCError, ValueError):
    """Raised when trajectories do not cover the expected time span."""


class InvalidStateError(OSOTOCError, ValueError):
    """Raised when a matrix is not a valid density matrix."""


def _error_title(error: Exception) -> str:
    if isinstance(error, ConfigError):
        return "Configuration error"
    if isinstance(error, NumericalError):
        return "Numerical failure"
    if isinstance(error, CapabilityError):
        return "Unsupported request"
    if isinstance(error, OutputError):
        return "Output error"
    return "Error"


def handle_error(console: Console, error: Exception) -> int:
    """Report an error and return the matching process exit code."""
    exit_code = error.exit_code if isinstance(error, OSOTOCError) else 1
    logger.error_with_fields(
        "Operation failed",
        error_type=type(error).__name__,
        error_message=str(error),
        exit_code=exit_code,
        operation="error_handling",
    )

    console.print(
        Panel(
            format_error_message(error),
            title=_error_title(error),
            border_style="red",
        )
    )
    return exit_code


def format_error_message(error: Exception) -> str:
    """Format error message for display."""
    if isinstance(error, ConfigError):
        return f"[red]Invalid configuration[/red]\nKey: {error.key}\n{error.reason}"
    elif isinstance(error, QuadratureError):
        return (
            f"[red]Quadrature failed[/red]\n"
            f"Quantity: {error.quantity}\n"
            f"Estimated error: {error.estimated_error:.3e}"
        )
    elif isinstance(error, TruncationError):
        return (
            f"[red]Fock truncation not converged[/red]\n"
            f"Cutoffs tried: {', '.join(str(n) for n in error.cutoffs)}\n"
            f"{error}"
        )
    elif isinstance(error, DimensionCapError):
        return (
            f"[red]Problem too large[/red]\n"
            f"Dimension: {error.dimension:,}\n"
            f"Cap: {error.cap:,}"
        )
    elif isinstance(error, OutputError):
        return (
            f"[red]Could not write results[/red]\nPath: {error.path}\n"
            f"Operation: {error.operation}\n{error}"
        )
    elif isinstance(error, NonCommutingChainError):
        return f"[red]Influence engine unavailable[/red]\nTerm: {error.term}"
    return f"[red]Error: {error}[/red]"
