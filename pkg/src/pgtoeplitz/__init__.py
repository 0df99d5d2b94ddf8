"""Glide-symmetric chiral models, twisted Toeplitz indices and edge zero modes."""

__version__ = "0.1.0"
