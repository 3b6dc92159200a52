"""Maintenance scripts for efold-cv."""
