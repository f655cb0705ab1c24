"""This module defines the configuration for the meshsim app."""
from django.apps import AppConfig


class MeshsimConfig(AppConfig):
    """
    This class defines the configuration for the meshsim app.

    Attributes:
        name (str): The app name.
    """

    name = 'meshsim'
