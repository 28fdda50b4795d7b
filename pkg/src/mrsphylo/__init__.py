"""Exact Bayesian sampling with interval-arithmetic envelopes (moore rejection sampling)."""

__version__ = "0.1.0"
