"""Test package for pontrol."""
