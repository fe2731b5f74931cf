"""minlab: numerical laboratory for minimal systems and their blow-up extensions."""

__version__ = "0.3.0"
