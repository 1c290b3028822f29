"""Contracting-geodesic certificates and shortcut quasimorphisms on model spaces.

The package ships four exactly or numerically computable geodesic model
spaces (free-group tree, hyperbolic half-plane, Euclidean space, products),
word algebra for groups acting on them, budgeted certificates for the
contraction property of geodesic segments, the shortcut ("expressway")
modified-length construction and the quasimorphisms it produces, rank-1 and
ping-pong tests, weak-proper-discontinuity counts, and quasimorphism algebra
on a concrete finite extension.  Everything is deterministic given a seed,
and every refutation carries a replayable witness.
"""

__version__ = "0.1.0"
