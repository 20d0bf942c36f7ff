"""Numerical laboratory for a Dehn-twisted time-N map of a Franks-Williams
type Anosov flow: foliation transversality, the N0 threshold, center arcs
and the homology action."""

__version__ = "0.1.0"
