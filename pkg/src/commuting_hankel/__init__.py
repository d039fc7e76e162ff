"""Hankel integral operators that commute with Sturm-Liouville operators."""
__version__ = "0.1.0"
