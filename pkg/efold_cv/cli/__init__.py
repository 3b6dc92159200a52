"""Batch front-end: experiment configs, the run/validate/report commands and artifacts."""
