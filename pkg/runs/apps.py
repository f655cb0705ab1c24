"""This module defines the configuration for the runs app."""
from django.apps import AppConfig


class RunsConfig(AppConfig):
    """
    This class defines the configuration for the runs app.

    Attributes:
        name (str): The app name.
    """

    name = 'runs'
