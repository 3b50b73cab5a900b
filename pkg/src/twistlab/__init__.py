"""Numerical verification laboratory for twisted Fock spaces and twisted Araki-Woods algebras."""

__version__ = "0.1.0"
