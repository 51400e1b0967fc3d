"""Finite groupoids, their convolution algebras, correspondences, induced
representations and hypergroupoids, computed exactly where possible."""

__version__ = "0.1.0"
