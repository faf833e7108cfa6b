"""Editable Gaussian-splat scenes: rendering, querying, commands, agents, service."""

__version__ = "0.1.0"
