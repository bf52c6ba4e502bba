"""Exception types shared across the package."""

from __future__ import annotations


class HolonomyError(Exception):
    """Base class for every failure mode this package raises deliberately."""


class NotClosed(HolonomyError):
    """The endpoint of a loop does not return to its start."""


class TooFewSamples(HolonomyError):
    """A loop needs at least 16 segments for the quadrature to be meaningful."""


class LengthMismatch(HolonomyError):
    """Sampled coefficients do not line up with the loop samples."""


class HermiticityViolation(HolonomyError):
    """An evaluated operator family is not Hermitian within tolerance."""


class GapTooSmall(HolonomyError):
    """Adjacent levels (near-)cross along the loop; the connection is undefined."""

    def __init__(self, sample: int, level: int, gap: float, tol: float):
        self.sample = sample
        self.level = level
        self.gap = gap
        self.tol = tol
        super().__init__(
            f"gap {gap:.3e} between levels {level} and {level + 1} at sample "
            f"{sample} is below tolerance {tol:.3e}"
        )


class NotNormalized(HolonomyError):
    """A state expected to be normalized is not."""


class NotUnitary(HolonomyError):
    """A matrix expected to be unitary is not."""


class PoleProximity(HolonomyError):
    """A closed-form connection is evaluated too close to one of its poles."""


class ZeroField(HolonomyError):
    """The spin eigensystem is undefined at zero field."""


class EllipticViolation(HolonomyError):
    """An effective oscillator frequency squared is non-positive."""

    def __init__(self, message: str, sample: int | None = None):
        self.sample = sample
        super().__init__(message)


class ModeCollapse(HolonomyError):
    """The lower normal-mode frequency squared is non-positive."""


class OmegaImaginary(HolonomyError):
    """The action-shifted oscillator frequency squared is non-positive."""


class WeakCouplingViolated(HolonomyError):
    """The weak-coupling expansion behind a one-form is not trustworthy."""


class NonAdiabatic(HolonomyError):
    """Time evolution left the tracked level; slow down the drive."""


class OverlapTooSmall(HolonomyError):
    """Initial/final overlap too small for a meaningful phase."""


class ConfigInvalid(HolonomyError):
    """An experiment configuration failed validation."""
