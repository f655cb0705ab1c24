"""This module initializes the params app."""
