"""Coverage and spectral efficiency of worst-case users in Poisson cellular networks.

Submodules: ``quadrature`` (adaptive Gauss-Kronrod), ``analytic`` (closed
forms and numerical integrals), ``geometry`` (Poisson patterns, Delaunay,
Voronoi vertices), ``simulator`` (Monte-Carlo estimates) and ``cli``.
"""
from .analytic import (
    NetworkParams,
    SirThreshold,
    coverage_cs,
    coverage_typical_il,
    coverage_worst_general,
    coverage_worst_il,
    kappa,
    rho,
    spectral_cs,
    spectral_worst,
)
from .simulator import SimConfig, run_simulation

__version__ = "0.1.0"

__all__ = [
    "NetworkParams",
    "SirThreshold",
    "SimConfig",
    "coverage_cs",
    "coverage_typical_il",
    "coverage_worst_general",
    "coverage_worst_il",
    "kappa",
    "rho",
    "run_simulation",
    "spectral_cs",
    "spectral_worst",
]
