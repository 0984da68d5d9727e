"""Permutation-valued spin ("permaspin") models: exact sums, transfer matrices,
mean-field and low-temperature approximations, and a Metropolis sampler."""

__version__ = "0.1.0"
