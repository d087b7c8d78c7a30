"""Bayesian regression with multi-degree B-spline atoms and reversible-jump MCMC."""

__version__ = "0.1.0"
