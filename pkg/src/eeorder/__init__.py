"""Phonological and distributional models of coordinate-compound word order."""

__version__ = "0.1.0"
