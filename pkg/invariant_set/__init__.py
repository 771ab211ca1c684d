"""Exact symbolic toolkit for signed-permutation root families, dyadic
fractional powers, n-lbits and their definability tests."""

__version__ = "0.1.0"
