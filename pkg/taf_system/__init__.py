"""Silver training data for multilingual task-oriented semantic parsing."""

__version__ = "0.1.0"
