"""Optimal horoball packing densities of the noncompact Coxeter simplex
tilings of hyperbolic 3-space, computed from the projective model."""

from .catalog import (Catalog, CoxeterSimplex, get_simplex, load_catalog,
                      subgroup_lattice, validate_simplex)
from .errors import HoroError, InvalidConfiguration, UnknownSymbol
from .estimator import PackingDensityEstimator, check_simplex
from .horoball import Horoball, busemann, horoball_piece_volume
from .packing import (PackingConfiguration, PackingResult, enumerate_configurations,
                      evaluate, maximal_s, optimize, propagate_tangency, verify_all)
from .volume import (catalan, closed_form_volume, decomposition_check, lobachevsky,
                     quadrature_volume)

__version__ = "0.1.0"

__all__ = [
    "Catalog", "CoxeterSimplex", "get_simplex", "load_catalog", "subgroup_lattice",
    "validate_simplex", "HoroError", "InvalidConfiguration", "UnknownSymbol",
    "PackingDensityEstimator", "check_simplex", "Horoball", "busemann",
    "horoball_piece_volume", "PackingConfiguration", "PackingResult",
    "enumerate_configurations", "evaluate", "maximal_s", "optimize",
    "propagate_tangency", "verify_all", "catalan", "closed_form_volume",
    "decomposition_check", "lobachevsky", "quadrature_volume", "__version__",
]
