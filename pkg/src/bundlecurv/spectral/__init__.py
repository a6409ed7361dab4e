"""Spectral calculus on compact fibers."""
