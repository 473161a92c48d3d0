"""Exact cohomology, towers and telescopes of spheres and tori."""

__version__ = "0.1.0"
