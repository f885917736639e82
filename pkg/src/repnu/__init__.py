"""Exact-arithmetic calculator for interpolated symmetric-group
representation categories, a mirabolic parabolic category O, and the
restriction functor connecting them."""

__version__ = "0.1.0"
