"""Dataset loading and generation."""
