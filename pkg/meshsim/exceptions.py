"""This module defines the errors of the meshsim app."""
from blowuplab.exceptions import LabError


class BadInitialData(LabError):
    """This class defines the error raised when the initial data is not regular at the origin."""


class StepSizeUnderflow(LabError):
    """
    This class defines the error raised when the stiff integrator cannot take a step.

    The mesh no longer resolves the layer: raise the node count.
    """


class MeshTangling(LabError):
    """This class defines the error raised when the nodes lose their order after every allowed restart."""


class NoBlowup(LabError):
    """This class defines the error raised when a trace ends before the gradient limit."""


class WindowTooShort(LabError):
    """This class defines the error raised when the fit window holds too few samples."""


class DegenerateFit(LabError):
    """This class defines the error raised when a rate fit has no admissible optimum."""
