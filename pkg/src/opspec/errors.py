"""Exception hierarchy shared by every layer of the toolkit."""


class OpspecError(Exception):
    """Base class for all errors raised by opspec."""


class NumericAmbiguity(OpspecError):
    """A tolerance-governed decision fell inside its ambiguity window."""


class IrrationalSpectrum(OpspecError):
    """Exact factorization over the Gaussian rationals failed."""


class IncompatibleOperands(OpspecError):
    """Two operator descriptions cannot be combined structurally."""

    def __init__(self, message, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class NotFiniteRank(OpspecError):
    """A perturbation has no power with finite-dimensional range."""


class NonCommuting(OpspecError):
    """A perturbation does not commute with the operator it perturbs."""


class UnsupportedImage(OpspecError):
    """A polynomial image of a set component leaves the representable class."""
