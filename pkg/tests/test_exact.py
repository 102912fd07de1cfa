"""Exact scalars: cyclotomic canonical form, pi powers and embeddings."""
import cmath
import json
import math
import time
from fractions import Fraction

import mpmath
import pytest

from euler_haar.controllers.verification import random_cyclotomic
from euler_haar.models.exact import (
    CyclotomicNumber, ExactScalar, arith, beta, format_rational, gamma_half, normalize, parse_rational,
    root_of_unity, to_complex,
)
from euler_haar.utils.errors import GuardError, NonInvertibleError, ParseError
from euler_haar.utils.settings import settings


def zeta(p, q):
    return root_of_unity(Fraction(p, q))


def test_root_of_unity_small_cases():
    assert root_of_unity(0) == 1
    assert root_of_unity(Fraction(1, 2)) == -1
    assert complex(root_of_unity(Fraction(1, 4))) == pytest.approx(1j)
    assert root_of_unity(Fraction(5, 4)) == root_of_unity(Fraction(1, 4))


def test_cube_roots_sum_to_minus_one():
    assert zeta(1, 3) + zeta(2, 3) == -1


def test_full_fifth_root_sum_is_zero():
    total = sum((zeta(k, 5) for k in range(1, 5)), CyclotomicNumber.rational(1))
    assert total.is_zero()


def test_sixth_root_canonical_form_keeps_value():
    raw = CyclotomicNumber(((Fraction(1, 6), Fraction(1)),))
    canonical = normalize(raw)
    assert complex(canonical) == pytest.approx(cmath.exp(1j * math.pi / 3))
    assert normalize(canonical) == canonical


def test_equal_values_have_equal_terms():
    # i = -i^3 and 1 + zeta(1/3) = -zeta(2/3)
    assert zeta(1, 4) == -zeta(3, 4)
    assert 1 + zeta(1, 3) == -zeta(2, 3)
    assert hash(1 + zeta(1, 3)) == hash(-zeta(2, 3))


def test_root_products_add_exponents():
    for p in range(1, 25):
        for q in (1, 5, 12):
            r, s = Fraction(1, p), Fraction(q - 1, q)
            assert root_of_unity(r) * root_of_unity(s) == root_of_unity(r + s)


def test_cyclotomic_inverse():
    value = 2 + zeta(1, 5) - zeta(1, 3)
    assert value * value.inverse() == 1
    with pytest.raises(NonInvertibleError):
        CyclotomicNumber().inverse()


def test_multiplying_by_zero_gives_zero():
    assert (zeta(1, 3) * 0).is_zero()
    assert (zeta(1, 3) * CyclotomicNumber()).is_zero()


def test_to_complex_pi():
    re, im = ExactScalar.pi().to_complex(30)
    with mpmath.workdps(40):
        assert abs(re - mpmath.pi) < mpmath.mpf(10) ** -30
    assert im == 0
    assert complex(ExactScalar.pi()) == pytest.approx(math.pi)


def test_to_complex_eighth_root():
    re, im = to_complex(ExactScalar.root_of_unity(Fraction(1, 8)), 20)
    assert float(re) == pytest.approx(math.sqrt(2) / 2)
    assert float(im) == pytest.approx(math.sqrt(2) / 2)


def test_to_complex_of_pi_squared_combination():
    value = ExactScalar.coerce(zeta(1, 3) + zeta(2, 3)) * ExactScalar.pi(2)
    assert complex(value) == pytest.approx(-math.pi ** 2)


def test_to_complex_rejects_excess_digits():
    with pytest.raises(ValueError):
        ExactScalar.one().to_complex(settings.max_digits + 1)


@pytest.mark.parametrize("op", ["add", "sub", "mul"])
def test_embedding_is_a_ring_homomorphism(op):
    a = ExactScalar.from_terms([(1, zeta(1, 5) + Fraction(1, 3)), (-1, zeta(2, 7))])
    b = ExactScalar.from_terms([(0, zeta(1, 12)), (2, CyclotomicNumber.rational(Fraction(-2, 9)))])
    expected = {'add': complex(a) + complex(b), 'sub': complex(a) - complex(b), 'mul': complex(a) * complex(b)}[op]
    assert complex(arith(a, b, op)) == pytest.approx(expected, rel=1e-12)


def test_arith_examples():
    assert arith(1, -1, 'add').is_zero()
    assert arith(ExactScalar.pi(), ExactScalar.pi(-1), 'mul') == 1
    assert ExactScalar.coerce(zeta(1, 3)) * ExactScalar.coerce(zeta(1, 3)) == ExactScalar.coerce(zeta(2, 3))
    assert arith(ExactScalar.pi(3), ExactScalar.pi(), 'div') == ExactScalar.pi(2)


def test_self_difference_is_zero():
    a = ExactScalar.from_terms([(0, zeta(3, 7)), (2, zeta(1, 9) * 5)])
    assert (a - a).is_zero()


def test_division_by_non_invertible_scalars():
    with pytest.raises(NonInvertibleError):
        arith(1, 0, 'div')
    with pytest.raises(NonInvertibleError):
        ExactScalar.one() / (ExactScalar.pi() + 1)


def test_negative_powers():
    half_pi = ExactScalar.pi() * Fraction(1, 2)
    assert half_pi ** -2 == ExactScalar.pi(-2) * 4


def test_cyclotomic_order_guard():
    settings.max_cyclotomic_order = 10
    with pytest.raises(GuardError):
        root_of_unity(Fraction(1, 11))


def test_rational_parsing_and_formatting():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(4) == Fraction(4)
    assert format_rational(Fraction(2)) == "2/1"
    for bad in ("abc", "1/0", True, 0.5):
        with pytest.raises(ParseError):
            parse_rational(bad)


def test_list_encoding_restores_value():
    value = ExactScalar.from_terms([(-2, zeta(1, 6) * Fraction(3, 4)), (1, CyclotomicNumber.rational(7))])
    assert ExactScalar.from_list(value.to_list()) == value
    with pytest.raises(ParseError):
        ExactScalar.from_list([[0, [["x", "1"]]]])


def test_record_encoding_restores_value():
    value = ExactScalar.pi(-2) * ExactScalar.coerce(zeta(1, 3)) * Fraction(5, 7)
    assert ExactScalar.from_dict(json.loads(value.to_json())) == value
    assert ExactScalar.from_dict(value.to_list()) == value
    with pytest.raises(ParseError):
        ExactScalar.from_dict({'float': [0.5, 0.0]})


def test_float_shadow_rounds():
    assert ExactScalar.rational(Fraction(1, 3)).float_shadow(3) == [0.333, 0.0]


def test_gamma_and_beta_at_half_integers():
    assert gamma_half(Fraction(1, 2)) == (Fraction(1), 1)
    assert gamma_half(Fraction(5, 2)) == (Fraction(3, 4), 1)
    assert gamma_half(Fraction(4)) == (Fraction(6), 0)
    assert beta(Fraction(1, 2), Fraction(1, 2)) == ExactScalar.pi()
    assert beta(Fraction(1), Fraction(2)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        gamma_half(Fraction(1, 3))


def test_canonical_form_uses_smallest_order():
    assert zeta(1, 6) == -zeta(2, 3)
    assert (zeta(1, 4) * zeta(1, 4)).terms == ((Fraction(0), Fraction(-1)),)
    assert (zeta(1, 15) * zeta(2, 15)).order == 5
    assert normalize(CyclotomicNumber(((Fraction(1, 6), Fraction(1)),))).order == 3


def test_inverse_at_composite_order_is_fast():
    value = zeta(1, 23) + zeta(1, 19)
    assert value.order == 437
    start = time.perf_counter()
    inverse = value.inverse()
    assert value * inverse == 1
    assert time.perf_counter() - start < 30
    assert complex(inverse) == pytest.approx(1 / complex(value), rel=1e-9)


def test_products_across_three_primes():
    a = zeta(1, 17) + 2 * zeta(3, 17) - Fraction(1, 2)
    b = zeta(2, 19) - zeta(5, 19) + 3
    c = zeta(1, 23) + zeta(7, 23) + Fraction(2, 3)
    start = time.perf_counter()
    product = a * b * c
    assert product.order == 17 * 19 * 23
    assert product == a * (b * c)
    assert time.perf_counter() - start < 30
    assert complex(product) == pytest.approx(complex(a) * complex(b) * complex(c), rel=1e-9)


@pytest.mark.slow
def test_equal_values_always_share_terms(rng):
    for _ in range(300):
        a, b, c = (random_cyclotomic(rng) for _ in range(3))
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert normalize(a * b) == a * b
        if not a.is_zero() and a.order <= 120:
            assert a * a.inverse() == 1
        assert complex(a * b) == pytest.approx(complex(a) * complex(b), abs=1e-9)
