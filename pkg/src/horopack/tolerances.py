"""Numerical tolerances shared by every module.

All geometry runs in double precision; reference values carry six digits,
so these thresholds leave several orders of magnitude of headroom.
"""

EPS_ZERO = 1e-14      # coordinates below this (after scaling) count as zero
EPS_CLASS = 1e-10     # |<x,x>| on unit-Euclidean-norm x below this -> ideal
EPS_NORM = 1e-10      # deviation of <u,u> from 1 for a normalized form
EPS_ISO = 1e-10       # entrywise deviation of M^T J M from J
EPS_RES = 1e-9        # incidence / residual checks
EPS_DOM = 1e-12       # slack below 1 tolerated in an arccosh argument
EPS_TRI = 1e-12       # degenerate-triangle threshold (area scale)
EPS_GRAM = 1e-9       # Gram entries vs. diagram angles
