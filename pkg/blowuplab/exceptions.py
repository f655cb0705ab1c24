"""This module defines the root of the laboratory errors."""


class LabError(Exception):
    """
    This class defines the base error of every laboratory module.

    Management commands turn it into a ``CommandError`` and the api answers it with a 400.
    """
