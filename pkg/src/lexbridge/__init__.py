"""Enrich corpus word embeddings with rare words from a lexical knowledge graph."""

__version__ = "0.1.0"
