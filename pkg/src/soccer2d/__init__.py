"""Cycle-stepped 2D soccer agents: interception, passing, dribbling and blocking."""

__version__ = "0.1.0"
