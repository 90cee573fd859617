"""Corridor-world simulation and evaluation harness for instruction-guided navigation."""

__version__ = "0.1.0"
