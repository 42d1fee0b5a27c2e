"""Exception hierarchy.

Every error raised by the library derives from :class:`TensorRootError`, which
is itself a ``ValueError`` so that generic input-validation handlers keep
working.
"""


class TensorRootError(ValueError):
    """Base class for all library errors."""


class DimensionMismatchError(TensorRootError):
    pass


class NotHermitianError(TensorRootError):
    pass


class ResidualImaginaryTooLargeError(TensorRootError):
    """Inverse DFT left a non-negligible imaginary part (broken conjugate symmetry)."""

    def __init__(self, residue, threshold):
        self.residue = residue
        self.threshold = threshold
        super().__init__(
            f"imaginary residue {residue:.3e} exceeds threshold {threshold:.3e}; "
            "spectral slices are not conjugate-symmetric"
        )


class SingularSliceError(TensorRootError):
    """A (Fourier) slice is numerically singular.

    ``slice_index`` is 0-based and ``None`` when raised from a bare matrix
    kernel; ``iteration`` is set by the iterative solvers, which also attach
    the partial convergence trace for post-mortem inspection.
    """

    def __init__(self, slice_index=None, iteration=None, trace=None, detail=""):
        self.slice_index = slice_index
        self.iteration = iteration
        self.trace = trace
        parts = ["numerically singular slice"]
        if slice_index is not None:
            parts.append(f"index {slice_index}")
        if iteration is not None:
            parts.append(f"at iteration {iteration}")
        msg = " ".join(parts)
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NotPositiveDefiniteError(TensorRootError):
    """Input violates T-positive definiteness (some Fourier slice is not PD)."""

    def __init__(self, slice_index=None, which=None, detail=""):
        self.slice_index = slice_index
        self.which = which
        msg = "not T-positive definite: Fourier slice"
        if slice_index is not None:
            msg += f" {slice_index}"
        msg += " is not positive definite"
        if which is not None:
            msg = f"{which}: " + msg
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NotCenteredError(TensorRootError):
    pass


class SingularCovarianceError(TensorRootError):
    def __init__(self, which=None, detail=""):
        self.which = which
        msg = "covariance is singular or not positive definite"
        if which is not None:
            msg = f"{which}: " + msg
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ZeroVarianceChannelError(TensorRootError):
    def __init__(self, channel):
        self.channel = channel
        super().__init__(f"channel {channel} has zero variance")


class WrongChannelCountError(TensorRootError):
    pass
