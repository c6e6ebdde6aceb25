"""Upper and lower bounds for the density of planar sets avoiding unit distance."""

__version__ = "0.1.0"
