"""This module defines the configuration for the params app."""
from django.apps import AppConfig


class ParamsConfig(AppConfig):
    """
    This class defines the configuration for the params app.

    Attributes:
        name (str): The app name.
    """

    name = 'params'
