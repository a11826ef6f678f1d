"""Certified enumeration and incidence geometry of PCF parameters of z^2 + c."""

__version__ = "0.1.0"
