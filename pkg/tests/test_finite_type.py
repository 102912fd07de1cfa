"""Finite-type functions, entry polynomials and the symbolic expansion of the parametrizations."""
from fractions import Fraction

import numpy as np
import pytest

from euler_haar.controllers.euler import forward
from euler_haar.controllers.expansion import entry_function, expand, symbolic_entries
from euler_haar.controllers.verification import interior_angles
from euler_haar.models.angles import CoordinateKind, GroupKind
from euler_haar.models.exact import ExactScalar
from euler_haar.models.finite_type import EntryPolynomial, FiniteTypeFunction, monomial_layout
from euler_haar.utils.errors import GuardError, ParseError
from euler_haar.utils.settings import settings


@pytest.mark.parametrize("group, n", [(GroupKind.SU, 2), (GroupKind.SU, 3), (GroupKind.SO, 3), (GroupKind.SO, 4)])
def test_symbolic_entries_match_forward_map(group, n, rng):
    table = symbolic_entries(group, n)
    angles = interior_angles(group, n, rng, 30)
    mats = forward(angles).matrix
    for i in range(n):
        for j in range(n):
            np.testing.assert_allclose(table[i][j].evaluate(angles), mats[:, i, j], atol=1e-12)


def test_su2_entries_are_single_monomials():
    table = symbolic_entries(GroupKind.SU, 2)
    assert all(len(entry) == 1 for row in table for entry in row)
    u11 = next(iter(table[0][0].terms.items()))
    assert u11[1] == 1
    assert monomial_layout(GroupKind.SU, 2).describe(u11[0]) == {'phi1': 1, 'psi1': {'sin': 0, 'cos': 1}, 'omega1': 1}


@pytest.mark.parametrize("group", list(GroupKind))
def test_unitarity_relations_expand_to_zero(group):
    n = 3
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            text = " + ".join(f"u{i}{k}*conj(u{j}{k})" for k in range(1, n + 1)) + (" - 1" if i == j else "")
            assert expand(EntryPolynomial.parse(text), group, n).is_zero()


def test_determinant_expands_to_one():
    det = ("u11*u22*u33 - u11*u23*u32 - u12*u21*u33 + u12*u23*u31 + u13*u21*u32 - u13*u22*u31")
    assert expand(EntryPolynomial.parse(det), GroupKind.SU, 3) == FiniteTypeFunction.constant('su', 3, 1)


def test_aux_squares_are_rewritten():
    layout = monomial_layout(GroupKind.SU, 2)
    cos_squared = FiniteTypeFunction.monomial('su', 2, layout.unit(CoordinateKind.PSI, 0, 2, aux=True))
    sin_squared = FiniteTypeFunction.monomial('su', 2, layout.unit(CoordinateKind.PSI, 0, 2))
    assert len(cos_squared) == 2
    assert (cos_squared + sin_squared) == FiniteTypeFunction.constant('su', 2, 1)
    assert cos_squared.normalize() == cos_squared


def test_arithmetic_agrees_with_pointwise_values(rng):
    f = expand(EntryPolynomial.parse("u11 + 2*conj(u12)"), 'su', 2)
    g = expand(EntryPolynomial.parse("I*u21 - 1/3"), 'su', 2)
    angles = interior_angles(GroupKind.SU, 2, rng, 20)
    fv, gv = f.evaluate(angles), g.evaluate(angles)
    np.testing.assert_allclose((f * g).evaluate(angles), fv * gv, atol=1e-12)
    np.testing.assert_allclose((f - g).evaluate(angles), fv - gv, atol=1e-12)
    np.testing.assert_allclose((f ** 3).evaluate(angles), fv ** 3, atol=1e-12)
    np.testing.assert_allclose(f.conjugate().evaluate(angles), np.conj(fv), atol=1e-12)
    np.testing.assert_allclose((2 * f + 1).evaluate(angles), 2 * fv + 1, atol=1e-12)


def test_monomial_guard():
    f = expand(EntryPolynomial.parse("u11 + u12"), 'su', 2)
    settings.max_monomials = 3
    with pytest.raises(GuardError):
        f * f


def test_mismatched_groups_are_rejected(rng):
    f = FiniteTypeFunction.constant('su', 2, 1)
    with pytest.raises(ValueError):
        f + FiniteTypeFunction.constant('su', 3, 1)
    with pytest.raises(ValueError):
        f.evaluate(interior_angles(GroupKind.SO, 2, rng, 3))
    with pytest.raises(ValueError):
        f ** -1


def test_json_form():
    f = expand(EntryPolynomial.parse("u11*conj(u12) + 1/2"), 'su', 2)
    data = f.to_dict()
    assert data['group'] == 'su' and len(data['terms']) == len(f)
    assert FiniteTypeFunction.from_dict(data) == f
    with pytest.raises(ParseError):
        FiniteTypeFunction.from_dict({'group': 'su', 'n': 2, 'terms': [{'exponents': {'chi1': 1}, 'coeff': []}]})


def test_entry_polynomial_parsing():
    poly = EntryPolynomial.parse("u11*conj(u11) - 1/2")
    assert len(poly.terms) == 2
    assert poly.max_index() == 1
    assert sorted(len(factors) for _, factors in poly.terms) == [0, 2]
    assert EntryPolynomial.parse("u12^2").terms[0][1] == ((1, 2, False), (1, 2, False))
    assert EntryPolynomial.parse("(1 + I)*u21").terms[0][0] == 1 + ExactScalar.imaginary_unit()
    assert EntryPolynomial.parse("0.25*u11").terms[0][0] == Fraction(1, 4)


@pytest.mark.parametrize("text", ["u11 +", "x*u11", "1/u11", "sqrt(2)*u11", "u11**(1/2)"])
def test_entry_polynomial_rejects(text):
    with pytest.raises(ParseError):
        EntryPolynomial.parse(text)


def test_entry_polynomial_on_matrices():
    poly = EntryPolynomial.parse("u12*conj(u21) + 2")
    m = np.array([[[1, 2j], [3, 4]], [[0, 1], [-1, 0]]])
    np.testing.assert_allclose(poly.evaluate(m), [2j * 3 + 2, -1 + 2])


def test_expand_checks_indices():
    with pytest.raises(ValueError):
        expand(EntryPolynomial.parse("u13"), 'su', 2)
    with pytest.raises(ValueError):
        entry_function(EntryPolynomial.parse("u31"), 'so', 2)


def test_symbolic_rank_guard():
    settings.max_rank = 2
    with pytest.raises(GuardError):
        symbolic_entries(GroupKind.SU, 3)
