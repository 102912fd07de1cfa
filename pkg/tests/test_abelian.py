"""Admissible forms, exact Haar moments and the conjecture probe."""
import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from euler_haar.controllers.abelian import (
    circle_integral, conjecture_probe, exact_moment, integrate, jacobian, prefactor_report, spectrum, tilde,
    x_integral,
)
from euler_haar.controllers.expansion import expand
from euler_haar.controllers.haar import mc_integrate
from euler_haar.controllers.verification import interior_angles, random_entry_polynomial
from euler_haar.models.admissible import AdmissibleFunction, JacobianJ
from euler_haar.models.angles import GroupKind
from euler_haar.models.exact import ExactScalar
from euler_haar.models.finite_type import EntryPolynomial, FiniteTypeFunction
from euler_haar.models.reports import STATUS_CONSISTENT, STATUS_NOT_APPLICABLE, PrefactorReport, ProbeReport
from euler_haar.utils.errors import GuardError, ParseError
from euler_haar.utils.settings import settings


def function(text, group='su', n=2):
    return expand(EntryPolynomial.parse(text), group, n)


def test_circle_integrals():
    assert circle_integral(Fraction(0)) == ExactScalar.pi() * 2
    assert circle_integral(Fraction(3)).is_zero()
    assert circle_integral(Fraction(-1)).is_zero()
    assert circle_integral(Fraction(1, 2)) == ExactScalar.imaginary_unit() * 4
    assert complex(circle_integral(Fraction(1, 3))) == pytest.approx((np.exp(2j * np.pi / 3) - 1) / (1j / 3))


def test_x_integrals():
    assert x_integral(GroupKind.SU, 1, 0) == Fraction(1, 2)
    assert x_integral(GroupKind.SU, 0, 1) == ExactScalar.pi() * Fraction(1, 4)
    assert x_integral(GroupKind.SO, 0, 0) == 2
    assert x_integral(GroupKind.SO, 3, 2).is_zero()


def test_jacobian_factors():
    assert jacobian(GroupKind.SU, 2).factors == [(1, 0)]
    assert jacobian(GroupKind.SU, 3).factors == [(1, 0), (3, 0), (1, 0)]
    assert jacobian(GroupKind.SO, 3).factors == [(0, 0)]
    assert jacobian(GroupKind.SO, 4).factors == [(0, 0), (0, 1), (0, 0)]
    x = np.array([[0.5], [0.25]])
    np.testing.assert_allclose(jacobian(GroupKind.SU, 2).evaluate(x), [0.5 / np.pi ** 2, 0.25 / np.pi ** 2])


@pytest.mark.parametrize("group, n", [(GroupKind.SU, 2), (GroupKind.SU, 3), (GroupKind.SO, 3), (GroupKind.SO, 4)])
def test_constant_function_has_unit_mass(group, n):
    assert integrate(AdmissibleFunction.constant(group, n, 1)) == 1
    assert integrate(tilde(FiniteTypeFunction.constant(group, n, 5))) == 5


@pytest.mark.parametrize("group, n", [(GroupKind.SU, 2), (GroupKind.SU, 3), (GroupKind.SO, 3)])
def test_second_moments_of_entries(group, n):
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            assert exact_moment(tilde(function(f"u{i}{j}", group, n)), 1).is_zero()
            assert integrate(tilde(function(f"u{i}{j}*conj(u{i}{j})", group, n))) == Fraction(1, n)


def test_fourth_moments():
    assert integrate(tilde(function("u11^2*conj(u11)^2"))) == Fraction(1, 3)
    assert integrate(tilde(function("u11^2*conj(u11)^2", 'su', 3))) == Fraction(1, 6)
    assert integrate(tilde(function("u11*u22*conj(u11)*conj(u22)", 'su', 3))) == Fraction(1, 8)


def test_so_entries_integrate_to_zero():
    for i in range(1, 4):
        for j in range(1, 4):
            assert integrate(tilde(function(f"u{i}{j}", 'so', 3))).is_zero()
    assert integrate(tilde(function("u11^4", 'so', 3))) == Fraction(1, 5)


@pytest.mark.parametrize("group, n", [(GroupKind.SU, 2), (GroupKind.SU, 3), (GroupKind.SO, 3)])
def test_tilde_agrees_pointwise(group, n, rng):
    f = expand(random_entry_polynomial(rng, n, terms=3, degree=3), group, n)
    angles = interior_angles(group, n, rng, 40)
    np.testing.assert_allclose(tilde(f).evaluate_at_angles(angles), f.evaluate(angles), atol=1e-12)


def test_tilde_is_multiplicative(rng):
    f = expand(random_entry_polynomial(rng, 3, terms=2), 'su', 3)
    g = expand(random_entry_polynomial(rng, 3, terms=2), 'su', 3)
    assert tilde(f * g) == tilde(f) * tilde(g)
    assert tilde(f + g) == tilde(f) + tilde(g)


@pytest.mark.parametrize("group, n", [(GroupKind.SU, 2), (GroupKind.SU, 3), (GroupKind.SO, 3)])
def test_exact_moments_match_monte_carlo(group, n, rng):
    for _ in range(3):
        f = expand(random_entry_polynomial(rng, n, terms=2, degree=1), group, n)
        adm = tilde(f)
        for power in (1, 2, 3):
            exact = complex(exact_moment(adm, power))
            mean, err = mc_integrate(lambda a: f.evaluate(a) ** power, group, n, samples=40_000, seed=5)
            assert abs(exact - mean) < 5 * err + 1e-9


@pytest.mark.slow
@pytest.mark.parametrize("group, n", [(GroupKind.SU, 2), (GroupKind.SU, 3), (GroupKind.SO, 3), (GroupKind.SO, 4)])
def test_exact_moments_match_monte_carlo_on_many_functions(group, n, rng):
    for _ in range(50):
        f = expand(random_entry_polynomial(rng, n, terms=2, degree=2), group, n)
        adm = tilde(f)
        for power in (1, 2, 3):
            exact = complex(exact_moment(adm, power))
            mean, err = mc_integrate(lambda a: f.evaluate(a) ** power, group, n, samples=100_000, seed=17)
            assert abs(exact - mean) < 5 * err + 1e-9, (power, exact, mean, err)


@pytest.mark.parametrize("group, n", [(GroupKind.SU, 2), (GroupKind.SU, 3), (GroupKind.SO, 3)])
def test_spectrum_of_powers_lies_in_the_sumset(group, n, rng):
    for _ in range(10):
        adm = tilde(expand(random_entry_polynomial(rng, n, terms=2, degree=2), group, n))
        base = set(spectrum(adm))
        for power in (1, 2, 3):
            sumset = {tuple(map(sum, zip(*combo))) for combo in itertools.combinations_with_replacement(base, power)}
            assert set(spectrum(adm ** power)) <= sumset


def test_spectrum_of_single_entries():
    assert spectrum(tilde(function("u12"))) == [(Fraction(1, 2), Fraction(-1))]
    assert spectrum(tilde(function("u11"))) == [(Fraction(1, 2), Fraction(1))]
    assert sorted(spectrum(tilde(function("u11*conj(u11)")))) == [(Fraction(0), Fraction(0))]


def test_exact_moment_arguments():
    adm = tilde(function("u11"))
    assert exact_moment(adm, 0) == 1
    with pytest.raises(ValueError):
        exact_moment(adm, -1)
    settings.max_monomials = 2
    with pytest.raises(GuardError):
        exact_moment(tilde(function("u11 + u12 + u21")), 2)


def test_admissible_json():
    adm = tilde(function("u11*conj(u12) + I*u21", 'su', 3))
    data = adm.to_dict()
    assert data['z_vars'] == 5 and data['x_vars'] == 3
    assert AdmissibleFunction.from_dict(data) == adm
    with pytest.raises(ParseError):
        AdmissibleFunction.from_dict({'group': 'su', 'n': 2, 'terms': [{'m': ['1/x', '0'], 'c': []}]})


def test_probe_on_u12_is_consistent():
    report = conjecture_probe(function("u12"), 6)
    assert all(m.is_zero() for m in report.moments)
    assert len(report.moments) == 6
    assert report.verdict is not None and not report.verdict.contains_zero and report.verdict.verified
    assert report.status == STATUS_CONSISTENT


def test_probe_on_constant_is_not_applicable():
    report = conjecture_probe(FiniteTypeFunction.constant('su', 2, 1), 3)
    assert report.moments[0] == 1
    assert report.status == STATUS_NOT_APPLICABLE


def test_probe_with_nonvanishing_moment():
    # spectrum {(1/2, -1), (-1/2, 1)} surrounds the origin, second moment is 2 E|u12|^2
    report = conjecture_probe(function("u12 + conj(u12)"), 2)
    assert report.moments[0].is_zero()
    assert report.moments[1] == 1
    assert report.verdict.contains_zero and report.verdict.verified
    assert report.status == STATUS_NOT_APPLICABLE
    with pytest.raises(ValueError):
        conjecture_probe(function("u12"), 0)


def test_prefactor_audit():
    so = prefactor_report(GroupKind.SO, 3)
    assert so.effective == so.published
    assert so.residual == 1
    su = prefactor_report(GroupKind.SU, 2)
    assert su.effective == Fraction(-1, 2)
    assert su.effective == su.published
    assert su.residual == 2
    assert set(su.to_dict()) >= {'effective_prefactor', 'published_prefactor', 'residual'}


def test_reports_round_trip_through_json():
    report = conjecture_probe(function("u12 + conj(u12)"), 3)
    again = ProbeReport.from_dict(json.loads(report.to_json()))
    assert again.moments == report.moments
    assert again.spectrum == report.spectrum
    assert again.status == report.status and again.verdict.weights == report.verdict.weights
    prefactor = prefactor_report(GroupKind.SU, 3)
    assert PrefactorReport.from_dict(json.loads(prefactor.to_json())) == prefactor
    weight = jacobian(GroupKind.SO, 4)
    assert JacobianJ.from_dict(json.loads(weight.to_json())) == weight
    with pytest.raises(ParseError):
        ProbeReport.from_dict({'group': 'su', 'n': 2})
    with pytest.raises(ParseError):
        JacobianJ.from_dict({'group': 'su', 'n': 2, 'factors': [{'x_power': 'one'}]})
