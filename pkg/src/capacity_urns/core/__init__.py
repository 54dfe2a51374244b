"""Exact arithmetic and closed-form counting."""
