"""Observational type theory kernel, universe codes, and finite presheaf models."""

__version__ = "0.1.0"
