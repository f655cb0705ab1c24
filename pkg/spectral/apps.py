"""This module defines the configuration for the spectral app."""
from django.apps import AppConfig


class SpectralConfig(AppConfig):
    """
    This class defines the configuration for the spectral app.

    Attributes:
        name (str): The app name.
    """

    name = 'spectral'
