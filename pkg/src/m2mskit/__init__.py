"""Corpus construction and evaluation tools for many-to-many summarization."""

__version__ = "0.1.0"
