"""Scoring functions and descriptive statistics."""
