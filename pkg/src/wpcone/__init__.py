"""Weil-Petersson volumes of hyperbolic surfaces with boundaries and cone points.

The volume of the moduli space of genus-g hyperbolic surfaces with m
geodesic boundary circles and n cone points (angles up to pi) is an exact
polynomial in the boundary lengths and cone angles.  This package computes
those polynomials by a boundary-length recursion in rational arithmetic,
treats cone angles as imaginary lengths, and ships the numerical machinery
(gap kernels, moment integrals, McShane identity sums over simple closed
geodesics) that certifies the recursion end to end.

Quick start::

    from wpcone import ConeSurfaceSpec, SurfaceSignature, volume_polynomial
    from wpcone.polyalg import to_latex

    spec = ConeSurfaceSpec(SurfaceSignature(1, 0, 1), (3.14159,))
    print(to_latex(volume_polynomial(spec), kinds=("angle",)))

The `wpcone` console script exposes the same functionality from the shell.
"""

from wpcone.conepoints import (
    ConeSurfaceSpec,
    cusp_limit,
    volume_polynomial,
    volume_value,
)
from wpcone.polyalg import VolumePolynomial
from wpcone.recursion import SurfaceSignature, compute_volume

__all__ = [
    "ConeSurfaceSpec",
    "SurfaceSignature",
    "VolumePolynomial",
    "compute_volume",
    "cusp_limit",
    "volume_polynomial",
    "volume_value",
]

__version__ = "0.1.0"
