"""Maximal marked bumpless pipedreams and their Grothendieck polynomials."""

__version__ = "1.0.0"
