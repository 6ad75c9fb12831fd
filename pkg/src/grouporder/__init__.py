"""Desk-scale simulation of the Merlin-Arthur protocol certifying the order of a black-box group."""

__version__ = "0.1.0"
