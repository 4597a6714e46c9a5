import math
import random
import sys
from fractions import Fraction

import pytest

from wpcone.polyalg import (
    VolumePolynomial,
    antiderivative,
    canonical_terms,
    constant,
    divide_by_slot_length,
    embed,
    eval_exact,
    eval_numeric,
    monomial,
    mul_by_slot_length,
    partial_derivative,
    permute_slots,
    poly_add,
    poly_mul,
    scale,
    substitute_imaginary,
    substitute_zero,
    to_json,
    to_latex,
    to_text,
    zero,
)


def random_poly(rng, num_vars, max_deg=3, num_terms=4, parity=None):
    terms = {}
    for _ in range(num_terms):
        xexp = tuple(rng.randrange(max_deg + 1) for _ in range(num_vars))
        piexp = 2 * rng.randrange(3)
        coeff = Fraction(rng.randrange(-8, 9), rng.randrange(1, 7))
        terms.setdefault(xexp, {}).setdefault(piexp, Fraction(0))
        terms[xexp][piexp] += coeff
    return VolumePolynomial(num_vars, terms, parity)


def test_construction_prunes_zeros_and_merges():
    p = VolumePolynomial(
        2,
        {
            (1, 0): {0: Fraction(1, 2), 2: Fraction(0)},
            (0, 0): {0: Fraction(-3)},
        },
    )
    assert p.terms == {(1, 0): {0: Fraction(1, 2)}, (0, 0): {0: Fraction(-3)}}
    q = poly_add(p, scale(p, -1))
    assert q.is_zero() and q.terms == {}


def test_construction_validation():
    with pytest.raises(ValueError):
        VolumePolynomial(2, {(1,): {0: Fraction(1)}})
    with pytest.raises(ValueError):
        VolumePolynomial(1, {(-1,): {0: Fraction(1)}})
    with pytest.raises(ValueError):
        VolumePolynomial(1, {(0,): {3: Fraction(1)}})  # odd pi power
    with pytest.raises(ValueError):
        VolumePolynomial(1, {(0,): {0: Fraction(1)}}, parity=(2,))


def test_ring_axioms_random():
    rng = random.Random(20260817)
    for _ in range(40):
        n = rng.randrange(1, 4)
        a = random_poly(rng, n)
        b = random_poly(rng, n)
        c = random_poly(rng, n)
        assert poly_add(a, b) == poly_add(b, a)
        assert poly_mul(a, b) == poly_mul(b, a)
        assert poly_mul(a, poly_mul(b, c)) == poly_mul(poly_mul(a, b), c)
        assert poly_mul(a, poly_add(b, c)) == poly_add(
            poly_mul(a, b), poly_mul(a, c)
        )
        assert poly_add(a, zero(n)) == a
        assert poly_mul(a, constant(n, 1)) == a


def test_mul_tracks_pi_grading():
    # (pi^2/12) * (x/2) = pi^2 x / 24
    a = constant(1, Fraction(1, 12), piexp=2)
    b = monomial(1, (1,), Fraction(1, 2))
    assert poly_mul(a, b).terms == {(1,): {2: Fraction(1, 24)}}


def test_parity_multiplication_carries():
    # l * l = x  and  l*x * l = x^2
    one_l = VolumePolynomial(1, {(0,): {0: Fraction(1)}}, parity=(1,))
    sq = poly_mul(one_l, one_l)
    assert sq.parity == (0,) and sq.terms == {(1,): {0: Fraction(1)}}
    lx = VolumePolynomial(1, {(1,): {0: Fraction(1)}}, parity=(1,))
    assert poly_mul(lx, one_l).terms == {(2,): {0: Fraction(1)}}


def test_derivative_and_antiderivative_are_inverse():
    rng = random.Random(7)
    for _ in range(20):
        p = random_poly(rng, 2)
        for slot in (0, 1):
            q = antiderivative(p, slot)
            assert partial_derivative(q, slot) == p
            # odd-parity round trip as well
            p_odd = mul_by_slot_length(p, slot)
            assert partial_derivative(antiderivative(p_odd, slot), slot) == p_odd


def test_derivative_golden():
    # d/dl (l^2/48 + pi^2/12) = l/24
    p = VolumePolynomial(
        1, {(1,): {0: Fraction(1, 48)}, (0,): {2: Fraction(1, 12)}}
    )
    d = partial_derivative(p, 0)
    assert d.parity == (1,)
    assert d.terms == {(0,): {0: Fraction(1, 24)}}
    # second derivative: constant 1/24
    dd = partial_derivative(d, 0)
    assert dd.parity == (0,) and dd.terms == {(0,): {0: Fraction(1, 24)}}


def test_length_multiplication_roundtrip():
    rng = random.Random(11)
    p = random_poly(rng, 3)
    for slot in range(3):
        q = mul_by_slot_length(p, slot)
        assert q.parity[slot] == 1
        assert divide_by_slot_length(q, slot) == p
    with pytest.raises(RuntimeError):
        divide_by_slot_length(constant(1, 1), 0)


def test_substitute_imaginary_is_involution_and_flips_odd_powers():
    p = VolumePolynomial(
        1, {(1,): {0: Fraction(1, 48)}, (0,): {2: Fraction(1, 12)}}
    )
    q = substitute_imaginary(p, 0)
    assert q.terms == {(1,): {0: Fraction(-1, 48)}, (0,): {2: Fraction(1, 12)}}
    assert substitute_imaginary(q, 0) == p
    with pytest.raises(ValueError):
        substitute_imaginary(mul_by_slot_length(p, 0), 0)


def test_substitute_imaginary_matches_complex_evaluation():
    rng = random.Random(23)
    for _ in range(10):
        p = random_poly(rng, 2)
        q = substitute_imaginary(p, 0)
        theta = rng.uniform(0.1, 3.0)
        other = rng.uniform(0.1, 3.0)
        direct = eval_numeric(p, [theta * 1j, other])
        subbed = eval_numeric(q, [theta, other])
        assert abs(direct - subbed) < 1e-12 * max(1.0, abs(subbed))
        assert abs(direct.imag) < 1e-12


def test_substitute_zero_drops_slot():
    p = VolumePolynomial(
        2,
        {
            (1, 1): {0: Fraction(1, 2)},
            (0, 1): {0: Fraction(3)},
            (0, 0): {2: Fraction(1, 12)},
        },
    )
    q = substitute_zero(p, 0)
    assert q.num_vars == 1
    assert q.terms == {(1,): {0: Fraction(3)}, (0,): {2: Fraction(1, 12)}}


def test_eval_exact_matches_numeric():
    rng = random.Random(31)
    for _ in range(10):
        p = random_poly(rng, 2)
        vals = [Fraction(rng.randrange(0, 7), rng.randrange(1, 5)) for _ in range(2)]
        graded = eval_exact(p, vals)
        num = sum(float(c) * math.pi**pe for pe, c in graded.items())
        assert abs(num - eval_numeric(p, [float(v) for v in vals])) < 1e-12 * max(
            1.0, abs(num)
        )


def test_eval_numeric_rejects_negative_lengths():
    p = constant(1, 1)
    with pytest.raises(ValueError):
        eval_numeric(p, [-1.0])


def test_embed_and_permute():
    p = monomial(2, (2, 1), Fraction(5))
    q = embed(p, 4, [3, 0])
    assert q.terms == {(1, 0, 0, 2): {0: Fraction(5)}}
    r = permute_slots(q, [1, 0, 2, 3])
    assert r.terms == {(0, 1, 0, 2): {0: Fraction(5)}}
    # permuting two identical slots fixes a symmetric polynomial
    sym = poly_add(monomial(2, (1, 0), 1), monomial(2, (0, 1), 1))
    assert permute_slots(sym, [1, 0]) == sym


def test_canonical_order_is_graded_lex_descending():
    p = VolumePolynomial(
        2,
        {
            (0, 0): {2: Fraction(1), 0: Fraction(2)},
            (1, 1): {0: Fraction(1)},
            (2, 0): {0: Fraction(1)},
            (0, 2): {0: Fraction(1)},
        },
    )
    order = [(x, pe) for x, pe, _ in canonical_terms(p)]
    assert order == [
        ((2, 0), 0),
        ((1, 1), 0),
        ((0, 2), 0),
        ((0, 0), 2),
        ((0, 0), 0),
    ]


CONE_TORUS = VolumePolynomial(
    1, {(1,): {0: Fraction(-1, 48)}, (0,): {2: Fraction(1, 12)}}
)


def test_latex_golden_cone_torus():
    assert to_latex(CONE_TORUS, kinds=["angle"]) == (
        "-\\frac{\\theta_1^2}{48}+\\frac{\\pi^2}{12}"
    )


def test_latex_golden_four_holed_sphere():
    half = Fraction(1, 2)
    p = VolumePolynomial(
        4,
        {
            (1, 0, 0, 0): {0: half},
            (0, 1, 0, 0): {0: half},
            (0, 0, 1, 0): {0: half},
            (0, 0, 0, 1): {0: half},
            (0, 0, 0, 0): {2: Fraction(2)},
        },
    )
    assert to_latex(p) == (
        "\\frac{\\ell_1^2}{2}+\\frac{\\ell_2^2}{2}+\\frac{\\ell_3^2}{2}"
        "+\\frac{\\ell_4^2}{2}+2\\pi^2"
    )


def test_latex_suppresses_unit_coefficients_and_braces_large_powers():
    p = VolumePolynomial(1, {(5,): {0: Fraction(1)}, (0,): {10: Fraction(-1)}})
    assert to_latex(p) == "\\ell_1^{10}-\\pi^{10}"
    assert to_latex(zero(1)) == "0"


def test_json_golden():
    assert to_json(CONE_TORUS) == (
        '{"vars":1,"terms":[{"xexp":[1],"piexp":0,"coeff":"-1/48"},'
        '{"xexp":[0],"piexp":2,"coeff":"1/12"}]}'
    )


def test_serializers_reject_odd_parity():
    p = mul_by_slot_length(CONE_TORUS, 0)
    with pytest.raises(ValueError):
        to_json(p)
    with pytest.raises(ValueError):
        to_latex(p)


def test_text_rendering():
    assert to_text(CONE_TORUS, kinds=["angle"]) == "-1/48*theta_1^2 + 1/12*pi^2"
    assert to_text(scale(CONE_TORUS, -1), kinds=["angle"]) == (
        "1/48*theta_1^2 - 1/12*pi^2"
    )


if __name__ == "__main__":
    sys.exit(pytest.main(sys.argv))
