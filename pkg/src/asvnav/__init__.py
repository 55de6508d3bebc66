"""Desk-scale multi-vessel navigation laboratory.

A small numpy-only stack for studying cooperative collision avoidance on the
water: a 3-DoF catamaran simulator, curriculum scenario generation, planar
range-scan perception, COLREGs-aware rewards, distributional RL agents built on
a from-scratch neural core, and two classical planners for comparison.
"""

__version__ = "0.1.0"
