"""
Abelian side of the Haar integral.

``tilde`` carries a finite-type function to its admissible form;
``exact_moment`` integrates powers of admissible functions exactly against
the Jacobian weight, one circle factor per z variable and one Beta value per
x variable.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple

from euler_haar.controllers.haar import normalization
from euler_haar.controllers.hull import hull_contains_zero
from euler_haar.models.admissible import AdmissibleFunction, JacobianJ, Spectrum
from euler_haar.models.angles import GroupKind, coordinate_layout
from euler_haar.models.exact import ExactScalar, beta, root_of_unity
from euler_haar.models.finite_type import FiniteTypeFunction, monomial_layout
from euler_haar.models.reports import (
    STATUS_CANDIDATE, STATUS_CONSISTENT, STATUS_NOT_APPLICABLE, PrefactorReport, ProbeReport,
)

logger = logging.getLogger(__name__)


def tilde(f: FiniteTypeFunction) -> AdmissibleFunction:
    """Substitute x = sin(psi) (SU) or cos(phi) (SO) and z = e^{i d theta}."""
    layout = f.layout
    terms = {}
    for key, coeff in f.normalize().terms.items():
        m: List[Fraction] = []
        xkey: List[Tuple[int, int]] = []
        for s in layout.slots:
            if s.trig:
                xkey.append((key[s.offset], key[s.offset + 1]))
            else:
                m.append(Fraction(key[s.offset], s.coord.divisor))
        poly = terms.setdefault(tuple(m), {})
        xk = tuple(xkey)
        poly[xk] = poly[xk] + coeff if xk in poly else coeff
    return AdmissibleFunction(f.group, f.n, terms)


@lru_cache(maxsize=None)
def jacobian(group: GroupKind, n: int) -> JacobianJ:
    """Jacobian weight of the substitution, constants included.

    SU psi at level position j < m-1 gives x (1 - x^2)^(j-1), the last psi of a
    level gives x^(2m-3); SO phi at position j >= 2 gives (1 - x^2)^((j-2)/2).
    """
    group = GroupKind.parse(group)
    factors: List[Tuple[int, int]] = []
    for coord in coordinate_layout(group, n):
        if not coord.trig:
            continue
        m, j = coord.level, coord.position
        if group is GroupKind.SU:
            factors.append((1, 2 * (j - 1)) if j < m - 1 else (2 * m - 3, 0))
        else:
            factors.append((0, j - 2))
    report = normalization(group, n)
    return JacobianJ(group, n, factors, report.computed, report.published)


def circle_integral(q: Fraction) -> ExactScalar:
    """Integral of e^{i q theta} over [0, 2 pi]."""
    q = Fraction(q)
    if q == 0:
        return ExactScalar.pi(1) * 2
    if q.denominator == 1:
        return ExactScalar.zero()
    # (e^{2 pi i q} - 1) / (i q)
    minus_i = -ExactScalar.imaginary_unit()
    return (ExactScalar.coerce(root_of_unity(q)) - 1) * minus_i * (1 / q)


@lru_cache(maxsize=None)
def x_integral(group: GroupKind, a: int, c: int) -> ExactScalar:
    """Integral of x^a (1 - x^2)^(c/2) over [0, 1] (SU) or [-1, 1] (SO)."""
    value = beta(Fraction(a + 1, 2), Fraction(c, 2) + 1)
    if GroupKind.parse(group) is GroupKind.SU:
        return value * Fraction(1, 2)
    return ExactScalar.zero() if a % 2 else value


def integrate(f: AdmissibleFunction) -> ExactScalar:
    """Haar integral of the group function whose admissible form is ``f``."""
    jac = jacobian(f.group, f.n)
    total = ExactScalar.zero()
    for m, poly in f.terms.items():
        circle = ExactScalar.one()
        for q, d in zip(m, f.divisors):
            factor = circle_integral(q)
            if factor.is_zero():
                circle = factor
                break
            circle = circle * factor * Fraction(1, d)
        if circle.is_zero():
            continue
        for xkey, coeff in poly.items():
            value = coeff * circle
            for (a, c), (ja, jc) in zip(xkey, jac.factors):
                value = value * x_integral(f.group, a + ja, c + jc)
                if value.is_zero():
                    break
            total = total + value
    return total * jac.constant


def exact_moment(f: AdmissibleFunction, power: int) -> ExactScalar:
    """Exact Haar moment of the P-th power.

    Raises:
        GuardError: If f^P exceeds the monomial guard.
    """
    if power < 0:
        raise ValueError(f"Moment order must be nonnegative, got {power}")
    return integrate(f ** power)


def spectrum(f: AdmissibleFunction) -> Spectrum:
    return f.spectrum()


def prefactor_report(group: GroupKind, n: int) -> PrefactorReport:
    """Effective abelian prefactor 1/(i^{#z} prod d) next to the published display."""
    group = GroupKind.parse(group)
    layout = monomial_layout(group, n)
    divisors = [s.coord.divisor for s in layout.slots if not s.trig]
    i = ExactScalar.imaginary_unit()
    product = 1
    for d in divisors:
        product *= d
    effective = (i ** len(divisors) * product).inverse()
    if group is GroupKind.SU:
        published = (i ** (n * (n + 1) // 2 - 1) * (2 * (n - 1))).inverse()
    else:
        published = (i ** (n - 1)).inverse()
    report = normalization(group, n)
    residual = (effective * report.computed) / (published * report.published)
    return PrefactorReport(group, n, effective, published, report.computed, report.published, residual)


def conjecture_probe(f: FiniteTypeFunction, p_max: int) -> ProbeReport:
    """Moments up to ``p_max``, the spectrum and the hull verdict of one function."""
    if p_max < 1:
        raise ValueError(f"p_max must be positive, got {p_max}")
    adm = tilde(f)
    moments = []
    power = AdmissibleFunction.constant(f.group, f.n, 1)
    for p in range(1, p_max + 1):
        power = power * adm
        moments.append(integrate(power))
        logger.debug(f"Moment P={p}: {moments[-1].pretty()}")
    points = adm.spectrum()
    if adm.is_zero():
        return ProbeReport(f.group, f.n, p_max, moments, points, None, STATUS_NOT_APPLICABLE)
    verdict = hull_contains_zero(points)
    if any(not m.is_zero() for m in moments):
        status = STATUS_NOT_APPLICABLE
    elif verdict.contains_zero:
        status = STATUS_CANDIDATE
    else:
        status = STATUS_CONSISTENT
    return ProbeReport(f.group, f.n, p_max, moments, points, verdict, status)
