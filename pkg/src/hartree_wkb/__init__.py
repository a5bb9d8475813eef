"""Pseudospectral verification of multiphase WKB asymptotics for semiclassical Hartree equations."""

__version__ = "0.1.0"
