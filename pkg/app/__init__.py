"""BLUFS: sparse unsupervised feature selection with learned pseudo-labels."""

__version__ = "0.1.0"
