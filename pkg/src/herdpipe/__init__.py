"""Collar-sensor cattle monitoring: behavior classification and estrus detection."""

__version__ = "0.1.0"
