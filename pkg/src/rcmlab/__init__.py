"""Simulation laboratory for random connection models on the torus."""

__version__ = "0.1.0"
