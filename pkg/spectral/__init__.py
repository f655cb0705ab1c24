"""This module initializes the spectral app."""
