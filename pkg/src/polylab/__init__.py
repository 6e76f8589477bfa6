"""polylab: a numerical laboratory for 2D directed polymers in random environment."""

__version__ = "0.1.0"
