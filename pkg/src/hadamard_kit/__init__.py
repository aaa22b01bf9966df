"""Generalized Hadamard products of holomorphic functions on C*."""

__version__ = "0.1.0"
