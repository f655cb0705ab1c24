"""This module defines the errors of the params app."""
from blowuplab.exceptions import LabError


class InvalidParameters(LabError, ValueError):
    """This class defines the error raised when (d, k, N) are malformed."""


class SubcriticalDimension(LabError):
    """
    This class defines the error raised when d <= d*.

    Below d* the profile tail oscillates and the construction has no meaning.
    """


class DegenerateRegime(LabError):
    """This class defines the error raised when omega = 2 gamma, where both coupling integrals diverge."""
