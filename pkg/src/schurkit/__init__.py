"""Exact small-scale machinery for sum-free sets in finite abelian groups."""

from .abelian import AbelianGroup, GroupSubset, classify, make_group, mu, parse_group_spec
from .misolver import SimpleGraph, enumerate_mis

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "GroupSubset",
    "SimpleGraph",
    "classify",
    "enumerate_mis",
    "make_group",
    "mu",
    "parse_group_spec",
]
