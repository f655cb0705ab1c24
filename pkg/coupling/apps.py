"""This module defines the configuration for the coupling app."""
from django.apps import AppConfig


class CouplingConfig(AppConfig):
    """
    This class defines the configuration for the coupling app.

    Attributes:
        name (str): The app name.
    """

    name = 'coupling'
