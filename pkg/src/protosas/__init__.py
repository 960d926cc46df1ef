"""Protograph LDPC codes for additive symmetric alpha-stable noise channels."""

__version__ = "0.1.0"
