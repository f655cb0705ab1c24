"""This module initializes the meshsim app."""
