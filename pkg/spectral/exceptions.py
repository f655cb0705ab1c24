"""This module defines the errors of the spectral app."""
from blowuplab.exceptions import LabError


class QuadratureNotConverged(LabError):
    """This class defines the error raised when the orthonormality residual stays above target."""


class DivergentIntegrand(LabError):
    """This class defines the error raised when a weighted integrand is not integrable at y=0."""
