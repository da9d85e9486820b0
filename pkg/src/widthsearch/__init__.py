"""Hidden-layer width search for one-hidden-layer binary classifiers."""

__version__ = "0.1.0"
