"""Pontrol - Pontryagin optimal control of quarantine-controlled SEIR models."""

__version__ = "0.1.0"
