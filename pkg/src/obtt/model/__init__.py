"""Finite presheaf semantics: categories, presheaves, hosts, checks."""
