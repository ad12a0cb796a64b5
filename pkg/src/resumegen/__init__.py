"""Synthetic job description / resume triples generated from a skill-occupation graph."""

__version__ = "0.1.0"
