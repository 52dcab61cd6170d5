"""Dual-control task environments with non-turn-taking team coordination."""

__version__ = "0.1.0"
