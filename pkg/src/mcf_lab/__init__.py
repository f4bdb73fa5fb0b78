"""Curve-shortening flow, solitons and symmetries on Riemannian surfaces."""

from . import affine, curves, families, fields, flow, geometry, kernels, soliton, symmetry
from .errors import *  # noqa: F401,F403
from .fields import Domain, ScalarField
from .geometry import SurfaceMetric, VectorFieldSpec

__version__ = "0.1.0"

__all__ = ["affine", "curves", "families", "fields", "flow", "geometry", "kernels", "soliton",
           "symmetry", "Domain", "ScalarField", "SurfaceMetric", "VectorFieldSpec", "__version__"]
