"""Numerical verification of McShane-type identities on one-holed tori.

A hyperbolic torus with one boundary circle, one cone point, or one cusp is
determined by the traces (x, y, z) of a marked generating pair and their
product, subject to the Fricke relation

    x^2 + y^2 + z^2 - x*y*z = kappa,

where the constant encodes the boundary data: kappa = 2 - 2*cos(theta/2)
for a cone point of angle theta, kappa = 2 - 2*cosh(L/2) for a boundary
geodesic of length L, and kappa = 0 for a cusp (the Markov equation).

Simple closed geodesics on the torus correspond to slopes p/q, and their
traces are generated from a root triple by the exchange moves

    (x, y, z) -> (x, z, x*z - y)  and  (x, y, z) -> (y, z, y*z - x),

a Stern-Brocot traversal that visits every slope exactly once.  Slopes of
both signs are reached from two root nodes: the given triple (x, y, z) and
its mirror (x, y, x*y - z).  Traces grow strictly along every branch, so
the tree can be pruned at a length cutoff and the enumeration below the
cutoff is complete.

Summing one gap width per geodesic then recovers half the boundary data:
theta/2, L/2, or 1/2.  These identities are convention-discriminating --
any error in the kernels, the trace conventions, or the enumeration makes
the sums converge to the wrong constant -- which is what makes this module
an effective end-to-end check of everything the volume recursion rests on.

The same machinery verifies the torus volume in integral form: the first
length moment of the cone-point gap kernel equals theta times the volume
polynomial of the one-cone torus.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

from wpcone.kernels import (
    BoundaryLabel,
    GapKernel,
    cone_torus_kernel,
    gap_value,
    integrate_decaying,
)

#: Traversal safety valve: a correct walk at sane cutoffs visits a few
#: thousand nodes, so hitting this bound means the pruning logic is broken.
_MAX_TREE_NODES = 5_000_000


class Geodesic(NamedTuple):
    """A simple closed geodesic: its slope label, trace, and length."""

    slope: Tuple[int, int]
    trace: float
    length: float


@dataclass(frozen=True)
class TraceTriple:
    """Traces (x, y, z) of a marked generating pair and their product word.

    All three traces must exceed 2 (hyperbolic elements); the triple's
    Fricke constant is whatever x^2 + y^2 + z^2 - x*y*z evaluates to.
    """

    x: float
    y: float
    z: float
    level: int = 0
    slope: Tuple[int, int] = (1, 1)

    def __post_init__(self) -> None:
        for t in (self.x, self.y, self.z):
            if not t > 2.0:
                raise ValueError(
                    "trace %r is not hyperbolic (must exceed 2)" % t
                )

    @property
    def kappa(self) -> float:
        x, y, z = self.x, self.y, self.z
        return x * x + y * y + z * z - x * y * z

    def fricke_residual(self, kappa: float) -> float:
        """Relative defect of the Fricke relation against a target constant."""
        x, y, z = self.x, self.y, self.z
        scale = max(1.0, x * x, y * y, z * z, abs(x * y * z))
        return abs(self.kappa - kappa) / scale


def kappa_for(label: BoundaryLabel) -> float:
    """Fricke constant matching a boundary circle, cone point, or cusp."""
    if label.kind == "cusp":
        return 0.0
    if label.kind == "cone":
        return 2.0 - 2.0 * math.cos(label.value / 2.0)
    return 2.0 - 2.0 * math.cosh(label.value / 2.0)


def root_triple(kappa: float, symmetric_start: bool = True) -> TraceTriple:
    """A point on the Fricke surface for the given constant.

    The symmetric start solves 3t^2 - t^3 = kappa on the branch t > 2 (the
    most symmetric torus); the asymmetric start stretches y to 1.15x and
    recovers z from the quadratic the relation imposes, taking the larger
    root so that z >= max(x, y) and the trace tree grows monotonically
    from the outset.
    """
    if not kappa < 4.0:
        raise ValueError(
            "no hyperbolic root triple exists for kappa=%r (needs kappa < 4, "
            "i.e. a genuine cone angle, boundary length, or cusp)" % kappa
        )
    from scipy.optimize import brentq

    hi = 4.0
    while 3.0 * hi * hi - hi ** 3 - kappa > 0.0:
        hi *= 2.0
    t = brentq(
        lambda s: 3.0 * s * s - s ** 3 - kappa,
        2.0,
        hi,
        xtol=1e-13,
        rtol=8.9e-16,
    )
    if symmetric_start:
        return TraceTriple(t, t, t)
    x = t
    y = 1.15 * x
    disc = x * x * y * y - 4.0 * (x * x + y * y - kappa)
    if disc < 0.0:
        raise ValueError(
            "asymmetric start has no real trace solution for kappa=%r" % kappa
        )
    z = 0.5 * (x * y + math.sqrt(disc))
    return TraceTriple(x, y, z)


def _slope_sort_key(slope: Tuple[int, int]):
    p, q = slope
    if q == 0:
        return (1, Fraction(0))
    return (0, Fraction(p, q))


def _walk_subtree(
    a: float,
    b: float,
    c: float,
    sa: Tuple[int, int],
    sb: Tuple[int, int],
    sc: Tuple[int, int],
    tmax: float,
) -> List[Tuple[Tuple[int, int], float]]:
    """Collect (slope, trace) for every tree node with trace <= tmax.

    Traces increase strictly along branches once the newest trace dominates
    the other two, so a dominated node above the cutoff ends its subtree;
    the rare non-dominant node (possible only near an asymmetric root) is
    descended regardless.
    """
    out: List[Tuple[Tuple[int, int], float]] = []
    stack = [(a, b, c, sa, sb, sc)]
    visited = 0
    while stack:
        a, b, c, sa, sb, sc = stack.pop()
        visited += 1
        if visited > _MAX_TREE_NODES:
            raise RuntimeError(
                "trace tree traversal exceeded %d nodes; pruning failed"
                % _MAX_TREE_NODES
            )
        if not c > 2.0:
            raise RuntimeError(
                "non-hyperbolic trace %r appeared in the tree (invalid "
                "root data)" % c
            )
        if c <= tmax:
            out.append((sc, c))
        elif c >= a and c >= b:
            continue
        mab = (sa[0] + sc[0], sa[1] + sc[1])
        stack.append((a, c, a * c - b, sa, sc, mab))
        mbc = (sb[0] + sc[0], sb[1] + sc[1])
        stack.append((b, c, b * c - a, sb, sc, mbc))
    return out


def enumerate_geodesics(
    root: TraceTriple, length_cutoff: float, threads: int = 1
) -> List[Geodesic]:
    """All simple closed geodesics up to the length cutoff, one per slope.

    Lengths come from traces via len = 2*arccosh(trace/2).  The result is
    sorted by slope, so it is deterministic and independent of the thread
    count used for the subtree walks.
    """
    tmax = 2.0 * math.cosh(length_cutoff / 2.0)
    x, y, z = root.x, root.y, root.z
    w = x * y - z  # mirror solution of the trace quadratic: negative slopes
    if not w > 2.0:
        raise RuntimeError(
            "mirror trace %r is not hyperbolic; root triple does not come "
            "from a hyperbolic structure" % w
        )
    found: List[Tuple[Tuple[int, int], float]] = [
        (slope, t)
        for slope, t in [((0, 1), x), ((1, 0), y), ((1, 1), z), ((-1, 1), w)]
        if t <= tmax
    ]
    jobs = [
        (x, z, x * z - y, (0, 1), (1, 1), (1, 2)),
        (y, z, y * z - x, (1, 0), (1, 1), (2, 1)),
        (x, w, x * w - y, (0, 1), (-1, 1), (-1, 2)),
        (y, w, y * w - x, (-1, 0), (-1, 1), (-2, 1)),
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_walk_subtree, *job, tmax) for job in jobs]
            for fut in futures:
                found.extend(fut.result())
    else:
        for job in jobs:
            found.extend(_walk_subtree(*job, tmax))
    if not found:
        systole = 2.0 * math.acosh(min(x, y, z, w) / 2.0)
        raise ValueError(
            "length cutoff %g lies below the systole %.6f; no geodesics to "
            "enumerate" % (length_cutoff, systole)
        )
    found.sort(key=lambda item: _slope_sort_key(item[0]))
    return [
        Geodesic(slope, t, 2.0 * math.acosh(t / 2.0)) for slope, t in found
    ]


def _neumaier_sum(values: Sequence[float]) -> float:
    total = 0.0
    compensation = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            compensation += (total - t) + v
        else:
            compensation += (v - t) + total
        total = t
    return total + compensation


@dataclass(frozen=True)
class ConvergenceReport:
    """Partial sums of a McShane identity at increasing length cutoffs."""

    target: float
    rows: Tuple[Tuple[float, int, float, float], ...]  # cutoff, count, sum, residual
    geodesic_count: int

    @property
    def final_residual(self) -> float:
        return self.rows[-1][3]

    def to_json(self) -> str:
        doc = {
            "target": self.target,
            "geodesic_count": self.geodesic_count,
            "partial_sums": [
                {"cutoff": c, "count": n, "sum": s, "residual": r}
                for c, n, s, r in self.rows
            ],
        }
        return json.dumps(doc, separators=(",", ":"))

    def to_text(self) -> str:
        lines = ["target %.15g over %d geodesics" % (self.target, self.geodesic_count)]
        lines.append("%10s %8s %22s %12s" % ("cutoff", "count", "sum", "residual"))
        for c, n, s, r in self.rows:
            lines.append("%10.2f %8d %22.15e %12.3e" % (c, n, s, r))
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["cutoff,count,sum,residual"]
        for c, n, s, r in self.rows:
            lines.append("%r,%d,%r,%r" % (c, n, s, r))
        return "\n".join(lines)


def _summand(label: BoundaryLabel, length: float) -> float:
    if label.kind == "cusp":
        return 1.0 / (1.0 + math.exp(length)) if length < 700 else 0.0
    if label.kind == "cone":
        return cone_torus_kernel(label.value, length)
    gap = GapKernel(
        gamma=label,
        alpha=BoundaryLabel("geodesic", length),
        beta=BoundaryLabel("geodesic", length),
        alpha_interior=True,
    )
    return gap_value(gap).real


def mcshane_sum(
    root: TraceTriple,
    label: BoundaryLabel,
    length_cutoff: float = 40.0,
    checkpoints: Optional[Sequence[float]] = None,
    threads: int = 1,
) -> ConvergenceReport:
    """Partial sums of the generalized McShane identity on the torus.

    On a one-holed torus every embedded pair of pants wraps one interior
    geodesic twice, so the identity is a sum of one gap width per simple
    closed geodesic and converges to theta/2, L/2, or 1/2 according to the
    boundary data.  The root triple must lie on the matching Fricke
    surface.  Summation is compensated and runs in slope order, making the
    report bit-identical across thread counts.
    """
    kappa = kappa_for(label)
    if root.fricke_residual(kappa) > 1e-8:
        raise ValueError(
            "root triple has Fricke constant %r but the boundary data "
            "demands %r; the trace tree would enumerate a different surface"
            % (root.kappa, kappa)
        )
    if label.kind == "cusp":
        target = 0.5
    else:
        target = label.value / 2.0
    geodesics = enumerate_geodesics(root, length_cutoff, threads=threads)
    if checkpoints is None:
        cuts = [float(c) for c in range(10, int(length_cutoff) + 1, 5)]
        if not cuts or cuts[-1] != float(length_cutoff):
            cuts.append(float(length_cutoff))
    else:
        cuts = sorted(set(float(c) for c in checkpoints))
        if cuts and cuts[-1] > length_cutoff:
            raise ValueError(
                "checkpoint %g exceeds the length cutoff %g"
                % (cuts[-1], length_cutoff)
            )
    terms = [(geo.length, _summand(label, geo.length)) for geo in geodesics]
    rows = []
    for cut in cuts:
        included = [s for length, s in terms if length <= cut]
        total = _neumaier_sum(included)
        rows.append((cut, len(included), total, abs(target - total)))
    return ConvergenceReport(
        target=target, rows=tuple(rows), geodesic_count=len(geodesics)
    )


def integrate_volume_identity(
    theta: float, tail_cutoff: float = 40.0, tol: float = 1e-10
) -> float:
    """Torus volume recovered from the first moment of the gap kernel.

    Integrating x times the cone-point gap width over all x and dividing
    by theta reproduces the volume polynomial of the one-cone torus,
    -theta^2/48 + pi^2/12.  The integrand decays like x*exp(-x), so the
    truncation tail beyond the cutoff is bounded in closed form and must
    stay below the tolerance.
    """
    if not 0.0 < theta <= math.pi:
        raise ValueError(
            "cone angle must lie in (0, pi]; wider cones obstruct the pants "
            "decompositions this computation relies on (got %r)" % theta
        )
    tail = (
        2.0
        * math.sin(theta / 2.0)
        * (tail_cutoff + 1.0)
        * math.exp(-tail_cutoff)
    )
    if tail > tol:
        raise RuntimeError(
            "truncation tail bound %.3e exceeds tolerance %.3e; increase "
            "tail_cutoff" % (tail, tol)
        )
    moment = integrate_decaying(
        lambda x: x * cone_torus_kernel(theta, x),
        upper=tail_cutoff,
        tol=tol,
    )
    return moment / theta
