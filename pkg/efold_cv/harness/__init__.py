"""Evaluation protocol: ground-truth comparison, CI membership, aggregation."""
