"""Neumann-type Green functions and hitting estimates for random walk on
lattice discretizations of smooth planar domains."""

__version__ = "0.1.0"

from .domain import (BlobSpec, ConformalDomain, build_domain, contains, dphi,
                     phi, preset_domain, psi, select_blob_centers)
from .lattice import (LatticeGraph, ScalarField, apply_laplacian, blob_vertices,
                      discretize, star_components, stationary_measure)

__all__ = [
    "BlobSpec", "ConformalDomain", "build_domain", "contains", "dphi", "phi",
    "preset_domain", "psi", "select_blob_centers",
    "LatticeGraph", "ScalarField", "apply_laplacian", "blob_vertices",
    "discretize", "star_components", "stationary_measure",
    "__version__",
]
