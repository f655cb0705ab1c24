"""This module defines the configuration for the profiles app."""
from django.apps import AppConfig


class ProfilesConfig(AppConfig):
    """
    This class defines the configuration for the profiles app.

    Attributes:
        name (str): The app name.
    """

    name = 'profiles'
