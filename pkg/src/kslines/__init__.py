"""Kurzweil–Stieltjes integration on computable compact lines."""

__version__ = "0.1.0"
