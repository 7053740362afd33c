"""chromalg: exact graded-algebra toolkit for chromatic homology computations."""

__version__ = "0.1.0"
