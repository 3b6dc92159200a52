"""Pluggable engine components."""
