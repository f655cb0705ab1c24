"""This module defines the errors of the rates app."""
from blowuplab.exceptions import LabError


class NegativeEigenvalue(LabError):
    """This class defines the error raised when a construction is requested on a mode with lambda_N < 0."""


class BlowupOfEpsilon(LabError):
    """
    This class defines the error raised when the boundary-layer scale grows.

    It points at a sign error in the reduced constants.
    """
