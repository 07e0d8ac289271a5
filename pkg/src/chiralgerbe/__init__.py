"""Exact symbolic workbench for chiral differential operators on exterior bundles."""

__version__ = "0.1.0"
