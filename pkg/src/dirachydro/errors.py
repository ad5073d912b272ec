"""Exception types shared across the toolkit."""


class ContractError(ValueError):
    """A documented precondition was violated by the caller."""


class DegenerateSpinorError(ValueError):
    """Spinor has |scalar bilinear| below the usable threshold (lightlike direction)."""


class InstabilityError(RuntimeError):
    """Integration produced a non-finite or runaway state."""

    def __init__(self, step_index, message=None):
        self.step_index = step_index
        super().__init__(message or f"numerical instability at step {step_index}")


class FitError(RuntimeError):
    """Precession fit is underdetermined (no precession or too little data)."""


class StepSizeError(RuntimeError):
    """Numerical functional derivative is dominated by roundoff at the requested step."""


class InsufficientInteriorError(ValueError):
    """Grid has no trusted interior left after masking boundary stencils."""
