"""Public API for volumes of hyperbolic surfaces with cone points.

The moduli space of genus-g hyperbolic surfaces with m geodesic boundary
components of lengths L_1..L_m and n conical singularities of angles
theta_1..theta_n carries a symplectic volume that is a polynomial in the
boundary lengths and cone angles.  A cone point behaves exactly like a
boundary circle of imaginary length i*theta, so the polynomial is obtained
from the all-boundary volume by substituting i*theta into the chosen slots;
evenness in each length variable guarantees the result has real (rational
times pi-power) coefficients.

Angles are restricted to (0, pi].  Beyond pi the surface can fail to admit
the pants decompositions the recursion integrates over, so wider angles are
rejected up front rather than silently producing a meaningless polynomial.

The theta -> 0 limit of a cone point is a cusp, and it matches the L -> 0
limit of a boundary component; `cusp_limit` exposes that degeneration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from wpcone.polyalg import VolumePolynomial, eval_numeric, substitute_zero
from wpcone.recursion import (
    DEFAULT_MAX_GENUS,
    DEFAULT_MAX_SLOTS,
    SurfaceSignature,
    compute_volume,
)
from wpcone.kernels import DEFAULT_MAX_MOMENT_K

_ANGLE_RANGE_ERROR = (
    "cone angle must lie in (0, pi]; wider cones obstruct the pants "
    "decompositions this computation relies on"
)


@dataclass(frozen=True)
class ConeSurfaceSpec:
    """A surface to compute: signature plus optional numeric boundary data.

    `boundary_lengths` may be omitted (None) to keep the length slots
    symbolic; `cone_angles` must always be supplied, one angle in (0, pi]
    per cone point.  Angles are radians.
    """

    sig: SurfaceSignature
    cone_angles: Tuple[float, ...] = ()
    boundary_lengths: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        angles = tuple(float(a) for a in self.cone_angles)
        object.__setattr__(self, "cone_angles", angles)
        if len(angles) != self.sig.cones:
            raise ValueError(
                "expected %d cone angles for signature %s, got %d"
                % (self.sig.cones, self.sig, len(angles))
            )
        for a in angles:
            if not 0.0 < a <= math.pi:
                raise ValueError(_ANGLE_RANGE_ERROR + " (got %r)" % a)
        if self.boundary_lengths is not None:
            lengths = tuple(float(x) for x in self.boundary_lengths)
            object.__setattr__(self, "boundary_lengths", lengths)
            if len(lengths) != self.sig.boundaries:
                raise ValueError(
                    "expected %d boundary lengths for signature %s, got %d"
                    % (self.sig.boundaries, self.sig, len(lengths))
                )
            for x in lengths:
                if x <= 0.0:
                    raise ValueError(
                        "boundary lengths must be positive (got %r)" % x
                    )


def volume_polynomial(
    spec: ConeSurfaceSpec,
    threads: int = 1,
    max_moment_k: Optional[int] = DEFAULT_MAX_MOMENT_K,
    max_genus: Optional[int] = DEFAULT_MAX_GENUS,
    max_slots: Optional[int] = DEFAULT_MAX_SLOTS,
) -> VolumePolynomial:
    """Exact volume polynomial for the spec's signature.

    Slots 0..m-1 are the boundary length variables and slots m..m+n-1 the
    cone angle variables (the angle sign is already absorbed, so evaluating
    with positive angle values gives the volume directly).
    """
    return compute_volume(
        spec.sig,
        threads=threads,
        max_moment_k=max_moment_k,
        max_genus=max_genus,
        max_slots=max_slots,
    )


def volume_value(
    spec: ConeSurfaceSpec,
    threads: int = 1,
    max_moment_k: Optional[int] = DEFAULT_MAX_MOMENT_K,
    max_genus: Optional[int] = DEFAULT_MAX_GENUS,
    max_slots: Optional[int] = DEFAULT_MAX_SLOTS,
) -> float:
    """Numeric volume at the spec's lengths and angles.

    Requires numeric boundary lengths whenever the signature has boundary
    components.  The result of a correct computation is strictly positive
    (the moduli space is nonempty); a non-positive value can only come from
    an internal defect and is raised as such rather than returned.
    """
    if spec.sig.boundaries > 0 and spec.boundary_lengths is None:
        raise ValueError(
            "numeric boundary lengths are required to evaluate the volume "
            "of signature %s" % (spec.sig,)
        )
    poly = volume_polynomial(
        spec,
        threads=threads,
        max_moment_k=max_moment_k,
        max_genus=max_genus,
        max_slots=max_slots,
    )
    values = list(spec.boundary_lengths or ()) + list(spec.cone_angles)
    result = eval_numeric(poly, values)
    if not result > 0.0:
        raise RuntimeError(
            "volume evaluated to a non-positive number (%r) for %s; "
            "volumes of nonempty moduli spaces are positive, so this "
            "signals an internal defect" % (result, spec)
        )
    return result


def cusp_limit(
    sig: SurfaceSignature,
    cone_slot: int = 0,
    threads: int = 1,
    max_moment_k: Optional[int] = DEFAULT_MAX_MOMENT_K,
    max_genus: Optional[int] = DEFAULT_MAX_GENUS,
    max_slots: Optional[int] = DEFAULT_MAX_SLOTS,
) -> VolumePolynomial:
    """Volume polynomial with one cone angle sent to zero (a cusp).

    `cone_slot` indexes the cone points (0-based, so slot k is global
    variable slot m + k).  The returned polynomial has that slot removed;
    it coincides with the volume of the same signature where the cone is
    replaced by a boundary circle whose length is set to zero.
    """
    if not 0 <= cone_slot < sig.cones:
        raise ValueError(
            "cone slot %d out of range for signature %s with %d cone points"
            % (cone_slot, sig, sig.cones)
        )
    poly = compute_volume(
        sig,
        threads=threads,
        max_moment_k=max_moment_k,
        max_genus=max_genus,
        max_slots=max_slots,
    )
    return substitute_zero(poly, sig.boundaries + cone_slot)
