"""Quantified Horn formulas: parsing, refutation search and the linear-time solver."""
