"""This package records the command-line invocations and exposes them read-only."""
