"""This module initializes the profiles app."""
