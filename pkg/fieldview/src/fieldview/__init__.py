"""Standalone plotting for geotransport field files."""

__version__ = "0.1.0"
