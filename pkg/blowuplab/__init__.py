"""This module initializes the blowuplab project."""

__version__ = '0.1.0'
