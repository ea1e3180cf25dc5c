"""Simulation and cheat synthesis for quantum bit commitment schemes."""

__version__ = "0.1.0"
