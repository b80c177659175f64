"""Modular checker for microarchitectural memory-ordering specifications."""

__version__ = "0.1.0"
