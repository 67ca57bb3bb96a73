"""Secret-key rate regions for correlated sources over a generalized MAC."""

__version__ = "0.1.0"
