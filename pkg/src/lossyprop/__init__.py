"""Lossy propagation of bounded-photon-number light through attenuating media."""

__version__ = "0.1.0"
