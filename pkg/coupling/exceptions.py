"""This module defines the errors of the coupling app."""
from blowuplab.exceptions import LabError


class RegimeMismatch(LabError):
    """This class defines the error raised when a coupling integral is requested outside its regime."""
