"""LLM agent that writes, validates, runs and repairs OpenFOAM cases."""

__version__ = "0.1.0"
