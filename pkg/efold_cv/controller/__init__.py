"""The e-fold stopping rule."""
