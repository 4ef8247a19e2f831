"""Exact symbolic toolkit for the principal W-algebra of psl(2|2) and its
relation to the small N=4 superconformal algebra."""

__version__ = "0.1.0"
