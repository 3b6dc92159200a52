"""Fold assignment."""
