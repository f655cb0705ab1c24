"""This module initializes the rates app."""
