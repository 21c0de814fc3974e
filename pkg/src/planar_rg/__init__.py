"""Planar quartic renormalisation-group flows, tree expansions and Borel summation."""

__version__ = "0.1.0"
