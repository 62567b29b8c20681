"""Exact verification of one-row summation formulas of Askey-Wilson and
Koornwinder type against independent difference-operator oracles."""

__version__ = "0.1.0"
