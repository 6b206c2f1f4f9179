"""Pontrol CLI package."""
