"""Exact recursion computing the volume polynomials V_{g,m,n}.

The volume of the moduli space of genus-g hyperbolic surfaces with N
geodesic boundaries satisfies an integral recursion in a distinguished
boundary: differentiating half the boundary length times the volume produces
a sum of pairing-kernel integrals against lower volumes.  Because every
integral is an odd moment of the pairing kernel, the whole right-hand side
collapses to exact polynomial algebra through moment_integral, and the
recursion runs entirely over rationals.

Cone points enter by substitution: a cone of angle theta is a boundary of
imaginary length i*theta, so the primary computation path evaluates the
all-boundary polynomial and substitutes -theta^2 for the squared length on
each cone slot.  An independent direct path (cone_volume_direct) re-runs the
recursion with the distinguished slot an actual cone and the kernels
evaluated at imaginary length; the two must agree exactly, term by term.

The right-hand side for distinguished boundary 1 of V_{g,N} has four parts:

  * non-separating: cutting along a pants bounded by boundary 1 and two
    interior geodesics x, y that stay connected: the double moment of
    V_{g-1, N+1}(x, y, rest), weight 1/4;
  * separating: the same pants disconnects the surface into an ordered pair
    of stable pieces sharing out genus and the remaining slots, weight 1/4;
  * boundary pairing: a pants bounded by boundary 1, another boundary j and
    one interior geodesic x: single moments of V_{g, N-1} at shifted
    arguments, weight 1/4;
  * the one-handled torus cap: for (g, N) = (1, 1) the interior geodesic
    bounds the handle by itself and contributes the bare first moment with
    weight 1/16.

The stored one-handled-torus volume is x/48 + pi^2/12: it already carries
the half coming from the elliptic involution of the torus, so no splitting
term applies any further weight for that piece.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from wpcone.kernels import DEFAULT_MAX_MOMENT_K, moment_integral, pairing_kernel
from wpcone.polyalg import (
    Terms,
    VolumePolynomial,
    antiderivative,
    constant,
    divide_by_slot_length,
    scale,
    substitute_imaginary,
)

#: Caps on user-requested signatures; the recursion itself has no intrinsic
#: limit, these keep accidental inputs from launching week-long computations.
DEFAULT_MAX_GENUS = 5
DEFAULT_MAX_SLOTS = 8


@dataclass(frozen=True)
class SurfaceSignature:
    """Topological type: genus, geodesic-boundary count, cone-point count."""

    genus: int
    boundaries: int
    cones: int

    def __post_init__(self) -> None:
        if min(self.genus, self.boundaries, self.cones) < 0:
            raise ValueError("signature components must be nonnegative")
        if 2 * self.genus - 2 + self.boundaries + self.cones <= 0:
            raise ValueError(
                f"signature (g={self.genus}, m={self.boundaries}, "
                f"n={self.cones}) is unstable: needs 2g - 2 + m + n > 0"
            )

    @property
    def slots(self) -> int:
        return self.boundaries + self.cones

    @property
    def dimension(self) -> int:
        """Real dimension of the moduli space, 6g - 6 + 2(m + n)."""
        return 6 * self.genus - 6 + 2 * self.slots


def delta_factor(sig: SurfaceSignature) -> int:
    """1 for the one-handled torus (1, 1, 0), else 0.

    Marks the signature whose stored volume already absorbs the factor half
    from the elliptic involution; assembly applies no further weight.
    """
    return int((sig.genus, sig.boundaries, sig.cones) == (1, 1, 0))


@dataclass(frozen=True)
class Splitting:
    """One ordered way a separating pants cut shares out genus and slots.

    Slot indices refer to the parent surface; each side additionally receives
    one new boundary (the pants curve it meets).  one_handle_* records which
    sides are bare one-handled tori -- informational only, since the stored
    torus volume is already halved (see the module docstring).
    """

    genus_first: int
    genus_second: int
    boundaries_first: Tuple[int, ...]
    boundaries_second: Tuple[int, ...]
    cones_first: Tuple[int, ...]
    cones_second: Tuple[int, ...]

    @property
    def one_handle_first(self) -> int:
        return int(
            self.genus_first == 1
            and not self.boundaries_first
            and not self.cones_first
        )

    @property
    def one_handle_second(self) -> int:
        return int(
            self.genus_second == 1
            and not self.boundaries_second
            and not self.cones_second
        )


def _subsets(items: Sequence[int]):
    for mask in range(1 << len(items)):
        yield tuple(items[i] for i in range(len(items)) if mask >> i & 1)


def enumerate_splittings(
    sig: SurfaceSignature, distinguished_slot: int = 0
) -> List[Splitting]:
    """All ordered stable splittings, in a fixed deterministic order.

    A side with genus h receiving k of the remaining slots is stable iff
    2h + k >= 2 (it keeps the new pants boundary as well).  Ordered pairs:
    an asymmetric split appears once per orientation.
    """
    if not 0 <= distinguished_slot < sig.slots:
        raise ValueError("distinguished slot out of range")
    bounds = [i for i in range(sig.boundaries) if i != distinguished_slot]
    cones = [
        i
        for i in range(sig.boundaries, sig.slots)
        if i != distinguished_slot
    ]
    out: List[Splitting] = []
    for g1 in range(sig.genus + 1):
        g2 = sig.genus - g1
        for I1 in _subsets(bounds):
            I2 = tuple(i for i in bounds if i not in I1)
            for J1 in _subsets(cones):
                J2 = tuple(i for i in cones if i not in J1)
                if 2 * g1 + len(I1) + len(J1) < 2:
                    continue
                if 2 * g2 + len(I2) + len(J2) < 2:
                    continue
                out.append(Splitting(g1, g2, I1, I2, J1, J2))
    return out


# -- memoization ---------------------------------------------------------------

_BOUNDARY_MEMO: Dict[Tuple[int, int], VolumePolynomial] = {}
_CONE_MEMO: Dict[Tuple[int, int, int], VolumePolynomial] = {}
_MEMO_LOCK = threading.Lock()


def clear_memo() -> None:
    """Drop all memoized volumes (mainly for tests and benchmarks)."""
    with _MEMO_LOCK:
        _BOUNDARY_MEMO.clear()
        _CONE_MEMO.clear()


def _memo_get(table, key):
    with _MEMO_LOCK:
        return table.get(key)


def _memo_put(table, key, value):
    # first writer wins; concurrent computations of the same key produce
    # identical exact polynomials, so returning the stored one keeps the
    # table linearizable
    with _MEMO_LOCK:
        return table.setdefault(key, value)


# -- assembly helpers ----------------------------------------------------------


def _acc(target: Terms, xexp: Tuple[int, ...], piexp: int, coeff: Fraction) -> None:
    bucket = target.setdefault(xexp, {})
    s = bucket.get(piexp, Fraction(0)) + coeff
    if s:
        bucket[piexp] = s
    else:
        del bucket[piexp]


def _merge(target: Terms, source: Terms) -> None:
    for xexp, graded in source.items():
        for piexp, coeff in graded.items():
            _acc(target, xexp, piexp, coeff)


def _pair_coefficient(a: int, b: int) -> Fraction:
    """The double moment collapses to a single one:

    int_0^inf int_0^inf x^(2a+1) y^(2b+1) h(x+y, t) dx dy
        = (2a+1)! (2b+1)! / (2a+2b+3)!  *  F_{2(a+b+1)+1}(t),

    by integrating the pairing kernel along lines x + y = const (the inner
    Euler beta integral produces the factorial ratio).  Certified directly
    against two-dimensional quadrature in the test suite.
    """
    return Fraction(
        math.factorial(2 * a + 1) * math.factorial(2 * b + 1),
        math.factorial(2 * a + 2 * b + 3),
    )


def _moment(k: int, max_moment_k: Optional[int], angle: bool) -> VolumePolynomial:
    poly = moment_integral(k, max_k=max_moment_k)
    return substitute_imaginary(poly, 0) if angle else poly


def _double_moment_terms(
    num_vars: int,
    dist_slot: int,
    dist_is_angle: bool,
    sub_terms_pairs,
    max_moment_k: Optional[int],
) -> Terms:
    """Accumulate the non-separating/separating transform.

    sub_terms_pairs yields (a, b, rest_xexp, piexp, coeff): the exponents of
    the two cut slots, the already-mapped exponent vector for the surviving
    slots (length num_vars, zero at dist_slot), and the term's pi-power and
    coefficient.
    """
    out: Terms = {}
    for a, b, rest, piexp, coeff in sub_terms_pairs:
        fac = coeff * _pair_coefficient(a, b)
        fpoly = _moment(a + b + 1, max_moment_k, dist_is_angle)
        for (r,), graded in fpoly.terms.items():
            key = rest[:dist_slot] + (rest[dist_slot] + r,) + rest[dist_slot + 1 :]
            for q, c in graded.items():
                _acc(out, key, piexp + q, fac * c)
    return out


def _pair_sum_terms(
    num_vars: int,
    dist_slot: int,
    partner_slot: int,
    dist_is_angle: bool,
    partner_is_angle: bool,
    sub_terms,
    max_moment_k: Optional[int],
) -> Terms:
    """Accumulate a boundary/cone pairing transform.

    For a term with cut-slot exponent k, the shifted-argument pair
    F(t+s) + F(t-s) expands through the binomial theorem (odd powers cancel):
    writing F(t) = sum_r c_r t^(2r),

        F(t+s) + F(t-s) = 2 sum_r c_r sum_{i=0}^{r} C(2r, 2i) t^(2(r-i)) s^(2i)

    with t the distinguished slot and s the partner.  An angle slot
    contributes (i*theta)^(2j) = (-1)^j theta^(2j).
    """
    out: Terms = {}
    for k, rest, piexp, coeff in sub_terms:
        fpoly = moment_integral(k, max_k=max_moment_k)
        for (r,), graded in fpoly.terms.items():
            for i in range(r + 1):
                sign = 1
                if dist_is_angle and (r - i) % 2:
                    sign = -sign
                if partner_is_angle and i % 2:
                    sign = -sign
                binom = 2 * sign * math.comb(2 * r, 2 * i)
                key = list(rest)
                key[dist_slot] += r - i
                key[partner_slot] += i
                key_t = tuple(key)
                for q, c in graded.items():
                    _acc(out, key_t, piexp + q, coeff * binom * c)
    return out


def _run_jobs(jobs: List[Callable[[], Terms]], threads: int) -> Terms:
    """Evaluate independent term groups, merging in submission order so the
    result is identical whatever the thread count (the arithmetic is exact)."""
    total: Terms = {}
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(lambda j: j(), jobs):
                _merge(total, part)
    else:
        for job in jobs:
            _merge(total, job())
    return total


# -- the all-boundary recursion -------------------------------------------------


def boundary_volume(
    g: int,
    nslots: int,
    threads: int = 1,
    max_moment_k: Optional[int] = DEFAULT_MAX_MOMENT_K,
) -> VolumePolynomial:
    """Exact volume polynomial for genus g with nslots geodesic boundaries.

    Memoized by (g, nslots); slot roles (length vs angle) are attached later
    by substitution.  Raises for unstable signatures and for closed surfaces,
    which have no boundary to recurse on.
    """
    key = (g, nslots)
    cached = _memo_get(_BOUNDARY_MEMO, key)
    if cached is not None:
        return cached
    if nslots == 0:
        raise ValueError(
            "closed surfaces have no distinguished boundary to recurse on; "
            "add a boundary or cone point"
        )
    SurfaceSignature(g, nslots, 0)  # stability check
    if (g, nslots) == (0, 3):
        result = constant(3, 1)
    else:
        rhs = assemble_rhs(g, nslots, threads=threads, max_moment_k=max_moment_k)
        result = integrate_distinguished(rhs, 0)
    _assert_homogeneous(result, 3 * g - 3 + nslots)
    return _memo_put(_BOUNDARY_MEMO, key, result)


def assemble_rhs(
    g: int,
    nslots: int,
    threads: int = 1,
    max_moment_k: Optional[int] = DEFAULT_MAX_MOMENT_K,
) -> VolumePolynomial:
    """Right-hand side of the recursion: the exact polynomial equal to
    d(l_1 * V_{g,nslots} / 2)/dl_1, distinguished slot 0.

    See the module docstring for the four term groups and their weights.
    """
    SurfaceSignature(g, nslots, 0)
    if nslots < 1:
        raise ValueError("the recursion needs a distinguished boundary")
    if (g, nslots) == (0, 3):
        raise ValueError("the three-holed sphere is a base case, not assembled")
    quarter = Fraction(1, 4)
    jobs: List[Callable[[], Terms]] = []

    # non-separating cut: two new boundaries on one connected piece
    if g >= 1 and 2 * (g - 1) + (nslots + 1) > 2:
        sub = boundary_volume(g - 1, nslots + 1, threads=1, max_moment_k=max_moment_k)

        def nonsep(sub=sub):
            def pairs():
                for xexp, graded in sub.terms.items():
                    rest = (0,) + xexp[2:]
                    for piexp, coeff in graded.items():
                        yield xexp[0], xexp[1], rest, piexp, quarter * coeff

            return _double_moment_terms(nslots, 0, False, pairs(), max_moment_k)

        jobs.append(nonsep)

    # separating cuts: ordered stable pairs sharing genus and slots
    for sp in enumerate_splittings(SurfaceSignature(g, nslots, 0), 0):
        sub1 = boundary_volume(
            sp.genus_first, len(sp.boundaries_first) + 1, 1, max_moment_k
        )
        sub2 = boundary_volume(
            sp.genus_second, len(sp.boundaries_second) + 1, 1, max_moment_k
        )

        def separating(sub1=sub1, sub2=sub2, sp=sp):
            def pairs():
                for e1, graded1 in sub1.terms.items():
                    for e2, graded2 in sub2.terms.items():
                        rest = [0] * nslots
                        for i, slot in enumerate(sp.boundaries_first):
                            rest[slot] = e1[1 + i]
                        for i, slot in enumerate(sp.boundaries_second):
                            rest[slot] = e2[1 + i]
                        rest_t = tuple(rest)
                        for q1, c1 in graded1.items():
                            for q2, c2 in graded2.items():
                                yield e1[0], e2[0], rest_t, q1 + q2, (
                                    quarter * c1 * c2
                                )

            return _double_moment_terms(nslots, 0, False, pairs(), max_moment_k)

        jobs.append(separating)

    # boundary pairings: a pants swallows boundary j alongside boundary 1
    if nslots >= 2 and 2 * g + (nslots - 1) > 2:
        sub = boundary_volume(g, nslots - 1, threads=1, max_moment_k=max_moment_k)
        for j in range(1, nslots):
            rest_slots = [s for s in range(1, nslots) if s != j]

            def pairing(sub=sub, j=j, rest_slots=rest_slots):
                def terms():
                    for xexp, graded in sub.terms.items():
                        rest = [0] * nslots
                        for i, slot in enumerate(rest_slots):
                            rest[slot] = xexp[1 + i]
                        rest_t = tuple(rest)
                        for piexp, coeff in graded.items():
                            yield xexp[0], rest_t, piexp, quarter * coeff

                return _pair_sum_terms(
                    nslots, 0, j, False, False, terms(), max_moment_k
                )

            jobs.append(pairing)

    # one-handled torus cap: the bare first moment, weight 1/16
    if (g, nslots) == (1, 1):

        def cap():
            out: Terms = {}
            fpoly = moment_integral(0, max_k=max_moment_k)
            for (r,), graded in fpoly.terms.items():
                for q, c in graded.items():
                    _acc(out, (r,), q, Fraction(1, 16) * c)
            return out

        jobs.append(cap)

    total = _run_jobs(jobs, threads)
    return VolumePolynomial(nslots, total)


def integrate_distinguished(rhs: VolumePolynomial, slot: int) -> VolumePolynomial:
    """Invert d(l V/2)/dl on the distinguished slot.

    Antiderivative with zero constant term (l V vanishes with l), then
    division by half the slot length.  A nonzero residue in the division
    signals an assembly bug upstream.
    """
    return scale(divide_by_slot_length(antiderivative(rhs, slot), slot), 2)


def _assert_homogeneous(p: VolumePolynomial, degree: int) -> None:
    for xexp, graded in p.terms.items():
        for piexp in graded:
            if sum(xexp) + piexp // 2 != degree:
                raise RuntimeError(
                    f"volume lost homogeneity: term {xexp} pi^{piexp} in a "
                    f"degree-{degree} polynomial"
                )


# -- signature-level API ---------------------------------------------------------


def compute_volume(
    sig: SurfaceSignature,
    threads: int = 1,
    max_moment_k: Optional[int] = DEFAULT_MAX_MOMENT_K,
    max_genus: Optional[int] = DEFAULT_MAX_GENUS,
    max_slots: Optional[int] = DEFAULT_MAX_SLOTS,
) -> VolumePolynomial:
    """Volume polynomial for (g, m, n): slots 0..m-1 are boundary lengths,
    slots m..m+n-1 are cone angles (squared-variable convention throughout).

    Computed on the all-boundary recursion, then each cone slot gets the
    imaginary substitution l -> i*theta, i.e. x -> -x.  The caps bound only
    the requested signature, not the recursion's internal sub-surfaces.
    """
    if max_genus is not None and sig.genus > max_genus:
        raise ValueError(
            f"genus {sig.genus} exceeds max_genus={max_genus}; raise the "
            "max_genus configuration knob to allow it"
        )
    if max_slots is not None and sig.slots > max_slots:
        raise ValueError(
            f"{sig.slots} boundary+cone slots exceed max_slots={max_slots}; "
            "raise the max_slots configuration knob to allow it"
        )
    poly = boundary_volume(
        sig.genus, sig.slots, threads=threads, max_moment_k=max_moment_k
    )
    for slot in range(sig.boundaries, sig.slots):
        poly = substitute_imaginary(poly, slot)
    return poly


# -- direct cone-slot recursion (verification path) ------------------------------


def cone_volume_direct(
    g: int,
    m: int,
    n: int,
    threads: int = 1,
    max_moment_k: Optional[int] = DEFAULT_MAX_MOMENT_K,
) -> VolumePolynomial:
    """Volume polynomial computed with the first cone slot distinguished.

    Verification path: the recursion runs with the distinguished slot an
    actual cone point, so every kernel moment is evaluated at imaginary
    length during assembly instead of substituted afterwards.  Must agree
    exactly with compute_volume; slot layout is identical (lengths first).
    """
    if n == 0:
        return boundary_volume(g, m, threads=threads, max_moment_k=max_moment_k)
    key = (g, m, n)
    cached = _memo_get(_CONE_MEMO, key)
    if cached is not None:
        return cached
    SurfaceSignature(g, m, n)
    if g == 0 and m + n == 3:
        result = constant(3, 1)
    else:
        rhs = _assemble_rhs_cone(g, m, n, threads, max_moment_k)
        result = integrate_distinguished(rhs, m)
    _assert_homogeneous(result, 3 * g - 3 + m + n)
    return _memo_put(_CONE_MEMO, key, result)


def _assemble_rhs_cone(
    g: int, m: int, n: int, threads: int, max_moment_k: Optional[int]
) -> VolumePolynomial:
    """Right-hand side with the first cone (slot m) distinguished.

    Sub-surface slot layouts stay canonical (new boundaries first, surviving
    lengths, then surviving cones), and each transform flips signs for the
    angle slots it touches.
    """
    nslots = m + n
    dist = m
    quarter = Fraction(1, 4)
    jobs: List[Callable[[], Terms]] = []

    # non-separating cut: piece has genus g-1, boundaries x, y plus the m
    # original lengths, and the cones minus the distinguished one
    if g >= 1 and 2 * (g - 1) - 2 + (m + 2) + (n - 1) > 0:
        sub = cone_volume_direct(g - 1, m + 2, n - 1, 1, max_moment_k)

        def nonsep(sub=sub):
            def pairs():
                for xexp, graded in sub.terms.items():
                    rest = [0] * nslots
                    for i in range(m):
                        rest[i] = xexp[2 + i]
                    for jcone in range(n - 1):
                        rest[m + 1 + jcone] = xexp[2 + m + jcone]
                    rest_t = tuple(rest)
                    for piexp, coeff in graded.items():
                        yield xexp[0], xexp[1], rest_t, piexp, quarter * coeff

            return _double_moment_terms(nslots, dist, True, pairs(), max_moment_k)

        jobs.append(nonsep)

    # separating cuts
    for sp in enumerate_splittings(SurfaceSignature(g, m, n), dist):
        sub1 = cone_volume_direct(
            sp.genus_first,
            len(sp.boundaries_first) + 1,
            len(sp.cones_first),
            1,
            max_moment_k,
        )
        sub2 = cone_volume_direct(
            sp.genus_second,
            len(sp.boundaries_second) + 1,
            len(sp.cones_second),
            1,
            max_moment_k,
        )

        def separating(sub1=sub1, sub2=sub2, sp=sp):
            def pairs():
                for e1, graded1 in sub1.terms.items():
                    for e2, graded2 in sub2.terms.items():
                        rest = [0] * nslots
                        for i, slot in enumerate(sp.boundaries_first):
                            rest[slot] = e1[1 + i]
                        for i, slot in enumerate(sp.cones_first):
                            rest[slot] = e1[1 + len(sp.boundaries_first) + i]
                        for i, slot in enumerate(sp.boundaries_second):
                            rest[slot] = e2[1 + i]
                        for i, slot in enumerate(sp.cones_second):
                            rest[slot] = e2[1 + len(sp.boundaries_second) + i]
                        rest_t = tuple(rest)
                        for q1, c1 in graded1.items():
                            for q2, c2 in graded2.items():
                                yield e1[0], e2[0], rest_t, q1 + q2, (
                                    quarter * c1 * c2
                                )

            return _double_moment_terms(nslots, dist, True, pairs(), max_moment_k)

        jobs.append(separating)

    # pairings with a surviving boundary or cone; the distinguished cone is
    # the gap's base curve and the surviving slot is the partner (the
    # exact-equality test against the substitution path pins this reading)
    if 2 * g - 2 + m + n - 1 > 0:
        # boundary partner: piece keeps genus, trades boundary j for x
        if m >= 1 and n >= 1:
            sub_b = cone_volume_direct(g, m, n - 1, 1, max_moment_k)
            for j in range(m):
                rest_bounds = [s for s in range(m) if s != j]

                def pairing_b(sub=sub_b, j=j, rest_bounds=rest_bounds):
                    def terms():
                        for xexp, graded in sub.terms.items():
                            rest = [0] * nslots
                            for i, slot in enumerate(rest_bounds):
                                rest[slot] = xexp[1 + i]
                            for i in range(n - 1):
                                rest[m + 1 + i] = xexp[m + i]
                            rest_t = tuple(rest)
                            for piexp, coeff in graded.items():
                                yield xexp[0], rest_t, piexp, quarter * coeff

                    return _pair_sum_terms(
                        nslots, dist, j, True, False, terms(), max_moment_k
                    )

                jobs.append(pairing_b)

        # cone partner: trades the partner cone for a boundary x
        if n >= 2:
            sub_c = cone_volume_direct(g, m + 1, n - 2, 1, max_moment_k)
            for jcone in range(1, n):
                partner = m + jcone
                rest_cones = [
                    s for s in range(m + 1, nslots) if s != partner
                ]

                def pairing_c(sub=sub_c, partner=partner, rest_cones=rest_cones):
                    def terms():
                        for xexp, graded in sub.terms.items():
                            rest = [0] * nslots
                            for i in range(m):
                                rest[i] = xexp[1 + i]
                            for i, slot in enumerate(rest_cones):
                                rest[slot] = xexp[1 + m + i]
                            rest_t = tuple(rest)
                            for piexp, coeff in graded.items():
                                yield xexp[0], rest_t, piexp, quarter * coeff

                    return _pair_sum_terms(
                        nslots, dist, partner, True, True, terms(), max_moment_k
                    )

                jobs.append(pairing_c)

    # one-handled torus cap at imaginary length
    if (g, m, n) == (1, 0, 1):

        def cap():
            out: Terms = {}
            fpoly = substitute_imaginary(
                moment_integral(0, max_k=max_moment_k), 0
            )
            for (r,), graded in fpoly.terms.items():
                for q, c in graded.items():
                    _acc(out, (r,), q, Fraction(1, 16) * c)
            return out

        jobs.append(cap)

    total = _run_jobs(jobs, threads)
    return VolumePolynomial(nslots, total)


# -- quadrature-backed numeric assembly (oracle path) -----------------------------


def numeric_volume_value(
    g: int,
    m: int,
    n: int,
    lengths: Sequence[float],
    angles: Sequence[float] = (),
    tol: float = 1e-10,
) -> float:
    """Evaluate V_{g,m,n} at one point with every kernel moment computed by
    quadrature instead of the frozen closed forms.

    The right-hand side is assembled with the same term structure as the
    symbolic path but each moment F_k(t) is an adaptive-quadrature integral,
    and the final inversion V = (2/L1) * int_0^{L1} rhs(u) du uses
    Gauss-Legendre with enough nodes to be exact on the polynomial
    integrand.  Requires m >= 1 (the distinguished slot must be a real
    boundary to integrate over).  Sub-volumes below the top level stay
    symbolic: the oracle isolates the top assembly step, which is the one
    the closed forms feed.
    """
    from numpy.polynomial.legendre import leggauss

    if m < 1:
        raise ValueError("the numeric oracle needs at least one boundary")
    if len(lengths) != m or len(angles) != n:
        raise ValueError("lengths/angles must match the signature")
    SurfaceSignature(g, m, n)
    nslots = m + n
    if (g, nslots) == (0, 3):
        return 1.0
    d = 3 * g - 3 + nslots
    big_l = lengths[0]
    rest = list(lengths[1:]) + list(angles)
    rest_is_angle = [False] * (m - 1) + [True] * n
    cache: Dict[tuple, float] = {}
    nodes, weights = leggauss(d + 2)
    half = big_l / 2
    total = 0.0
    for node, weight in zip(nodes, weights):
        u = half * (node + 1)
        total += weight * _numeric_rhs(
            g, nslots, u, rest, rest_is_angle, cache, tol
        )
    integral = half * total
    return 2 / big_l * integral


def _numeric_moment(k: int, t: complex, cache: Dict[tuple, float], tol: float) -> float:
    """F_{2k+1}(t) by quadrature; complex t pairs with its conjugate, so the
    cached value is the real integral of x^(2k+1) * 2 Re h(x, t) when t is
    complex and of x^(2k+1) h(x, t) when t is real."""
    from wpcone.kernels import integrate_decaying

    t = complex(t)
    if abs(t.imag) < 1e-15:
        key = ("r", k, round(t.real, 12))
        if key not in cache:
            tr = t.real
            cache[key] = integrate_decaying(
                lambda x: x ** (2 * k + 1) * pairing_kernel(x, tr).real, tol=tol
            )
        return cache[key]
    key = ("c", k, round(t.real, 12), round(abs(t.imag), 12))
    if key not in cache:
        tc = complex(t.real, abs(t.imag))
        cache[key] = integrate_decaying(
            lambda x: x ** (2 * k + 1) * 2 * pairing_kernel(x, tc).real, tol=tol
        )
    return cache[key]


def _eval_rest(rest_xexp, rest_vals, rest_is_angle) -> float:
    mono = 1.0
    for e, val, is_angle in zip(rest_xexp, rest_vals, rest_is_angle):
        if e:
            x = -(val * val) if is_angle else val * val
            mono *= x**e
    return mono


def _numeric_rhs(
    g: int,
    nslots: int,
    u: float,
    rest_vals: Sequence[float],
    rest_is_angle: Sequence[bool],
    cache: Dict[tuple, float],
    tol: float,
) -> float:
    pi = math.pi
    acc = 0.0

    def graded_value(graded, extra=1.0):
        return sum(float(c) * pi**q for q, c in graded.items()) * extra

    # non-separating
    if g >= 1 and 2 * (g - 1) + (nslots + 1) > 2:
        sub = boundary_volume(g - 1, nslots + 1, max_moment_k=None)
        for xexp, graded in sub.terms.items():
            a, b = xexp[0], xexp[1]
            mono = _eval_rest(xexp[2:], rest_vals, rest_is_angle)
            fnum = _numeric_moment(a + b + 1, u, cache, tol)
            acc += 0.25 * float(_pair_coefficient(a, b)) * graded_value(
                graded, mono
            ) * fnum

    # separating
    for sp in enumerate_splittings(SurfaceSignature(g, nslots, 0), 0):
        sub1 = boundary_volume(sp.genus_first, len(sp.boundaries_first) + 1,
                               max_moment_k=None)
        sub2 = boundary_volume(sp.genus_second, len(sp.boundaries_second) + 1,
                               max_moment_k=None)
        for e1, graded1 in sub1.terms.items():
            v1 = graded_value(graded1) * math.prod(
                _rest_value(rest_vals, rest_is_angle, slot, e1[1 + i])
                for i, slot in enumerate(sp.boundaries_first)
            )
            for e2, graded2 in sub2.terms.items():
                v2 = graded_value(graded2) * math.prod(
                    _rest_value(rest_vals, rest_is_angle, slot, e2[1 + i])
                    for i, slot in enumerate(sp.boundaries_second)
                )
                fnum = _numeric_moment(e1[0] + e2[0] + 1, u, cache, tol)
                acc += 0.25 * float(_pair_coefficient(e1[0], e2[0])) * v1 * v2 * fnum

    # pairings
    if nslots >= 2 and 2 * g + (nslots - 1) > 2:
        sub = boundary_volume(g, nslots - 1, max_moment_k=None)
        for j in range(1, nslots):
            s_val = rest_vals[j - 1]
            s_is_angle = rest_is_angle[j - 1]
            other = [s for s in range(1, nslots) if s != j]
            for xexp, graded in sub.terms.items():
                mono = 1.0
                for i, slot in enumerate(other):
                    mono *= _rest_value(
                        rest_vals, rest_is_angle, slot, xexp[1 + i]
                    )
                k = xexp[0]
                if s_is_angle:
                    # F(u + i*theta) + F(u - i*theta), one conjugate-pair quad
                    fnum = _numeric_moment(k, complex(u, s_val), cache, tol)
                else:
                    fnum = _numeric_moment(k, u + s_val, cache, tol) + (
                        _numeric_moment(k, u - s_val, cache, tol)
                    )
                acc += 0.25 * graded_value(graded, mono) * fnum

    # cap
    if (g, nslots) == (1, 1):
        acc += _numeric_moment(0, u, cache, tol) / 16

    return acc


def _rest_value(rest_vals, rest_is_angle, slot, exp) -> float:
    if not exp:
        return 1.0
    val = rest_vals[slot - 1]
    x = -(val * val) if rest_is_angle[slot - 1] else val * val
    return x**exp
