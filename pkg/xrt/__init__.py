"""Analytic X-ray transform on pixel/voxel grids."""

__version__ = "1.0.0"
