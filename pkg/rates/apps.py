"""This module defines the configuration for the rates app."""
from django.apps import AppConfig


class RatesConfig(AppConfig):
    """
    This class defines the configuration for the rates app.

    Attributes:
        name (str): The app name.
    """

    name = 'rates'
