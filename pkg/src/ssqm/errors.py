"""Exception hierarchy shared by every ssqm module."""

from __future__ import annotations


class SSQMError(Exception):
    """Base class for all errors raised by ssqm."""


class DimensionError(SSQMError, ValueError):
    """A matrix or vector has the wrong shape for the requested operation."""


class CompositionError(DimensionError):
    """Two step matrices cannot be multiplied together."""

    def __init__(self, left_shape, right_shape):
        self.left_shape = tuple(left_shape)
        self.right_shape = tuple(right_shape)
        super().__init__(
            f"cannot compose {self.left_shape[0]}x{self.left_shape[1]} "
            f"with {self.right_shape[0]}x{self.right_shape[1]}: "
            f"inner dimensions {self.left_shape[1]} != {self.right_shape[0]}"
        )


class NotSemiUnitaryError(SSQMError, ValueError):
    """A matrix failed the orthonormal-columns check."""

    def __init__(self, deviation: float, tolerance: float, shape):
        self.deviation = deviation
        self.tolerance = tolerance
        self.shape = tuple(shape)
        super().__init__(
            f"{self.shape[0]}x{self.shape[1]} matrix is not semi-unitary: "
            f"max |M^+M - I| = {deviation:.3e} > tolerance {tolerance:.3e}"
        )


class DegenerateMatrixError(SSQMError, ArithmeticError):
    """A 2x2 matrix has a repeated eigenvalue with a single eigenvector."""

    def __init__(self, eigenvalue: complex, message: str | None = None):
        self.eigenvalue = eigenvalue
        super().__init__(message or f"defective 2x2 matrix, repeated eigenvalue {eigenvalue}")


class SlotError(SSQMError, IndexError):
    """A signal operator was applied to a slot outside the net."""


class NetError(SSQMError, ValueError):
    """Labstates or nets do not match (rank mismatch, bad labels, bad keys)."""


class OracleSizeError(SSQMError, ValueError):
    """A dense embedding would exceed the oracle rank cap."""


class SectorError(SSQMError, ValueError):
    """A labstate has support outside the one-signal sector."""


class ScheduleError(SSQMError, ValueError):
    """A step operator does not fit the state it is applied to."""

    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")


class NumericIntegrityError(SSQMError, ArithmeticError):
    """Total probability drifted beyond the conservation threshold."""

    def __init__(self, step: int, residual: float, threshold: float):
        self.step = step
        self.residual = residual
        self.threshold = threshold
        super().__init__(
            f"conservation breach at step {step}: |sum Pr - 1| = {abs(residual):.3e} "
            f"exceeds {threshold:.1e}"
        )


class ChannelLookupError(SSQMError, KeyError):
    """A channel label or step index is absent from a trajectory."""

    def __str__(self):
        return str(self.args[0]) if self.args else "channel lookup failed"


class ParameterError(SSQMError, ValueError):
    """Scenario parameters violate their constraints or an argument is out of range."""


class RegimeError(ParameterError):
    """A Zeno-regime survival amplitude would not be normalizable."""


class DegenerateOscillationError(ParameterError):
    """The oscillation step has |Re a| = 1, so no mixing angle exists."""


class DegeneracyError(SSQMError, ArithmeticError):
    """Both Kaon eigenmode values coincide, so no decomposition exists."""


class ConfigError(SSQMError, ValueError):
    """A run configuration failed validation; ``errors`` holds every failure."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
