"""Exact Minkowski averages and non-convexity measures."""
