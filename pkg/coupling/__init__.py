"""This module initializes the coupling app."""
