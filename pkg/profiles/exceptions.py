"""This module defines the errors of the profiles app."""
from blowuplab.exceptions import LabError


class TrappingViolation(LabError):
    """This class defines the error raised when the computed orbit leaves the trapping region."""


class TailFitIllConditioned(LabError):
    """
    This class defines the error raised when the tail exponentials are numerically collinear.

    Enlarging the fit window or x_max usually cures it.
    """
