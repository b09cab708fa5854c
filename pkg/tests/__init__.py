"""Test package for cpnsurf."""
