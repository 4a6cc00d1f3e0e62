"""Slotted SINR mesh-network simulator with joint gateway selection,
link-rate allocation and power control."""

__version__ = "0.1.0"
