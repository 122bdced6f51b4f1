"""Numerical workbench for emergent algebras (dilation structures)."""
__version__ = "0.1.0"
