"""
Executable cross-checks, grouped in suites.

Every check returns a CheckResult tagged with the identity it exercises;
a check that raises is reported as failed with the error text.
"""
import itertools
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import special_ortho_group, unitary_group

from euler_haar.controllers.abelian import exact_moment, integrate, spectrum, tilde
from euler_haar.controllers.euler import (
    SHIFT_KINDS, forward, shift_identity_residual, so_inverse, su_inverse,
)
from euler_haar.controllers.expansion import expand, symbolic_entries
from euler_haar.controllers.generators import (
    ad_relation_residual, exp_generator, generator, trace_pairing,
)
from euler_haar.controllers.haar import density, density_from_jacobian, mc_integrate, normalization
from euler_haar.controllers.hull import basis_enumeration_contains_zero, hull_contains_zero
from euler_haar.models.admissible import AdmissibleFunction
from euler_haar.models.angles import EulerAngles, GroupElement, GroupKind, coordinate_layout
from euler_haar.models.exact import CyclotomicNumber, ExactScalar, normalize, root_of_unity
from euler_haar.models.finite_type import EntryPolynomial
from euler_haar.models.reports import CheckResult, VerificationReport
from euler_haar.utils.settings import settings

logger = logging.getLogger(__name__)

# (tag, identity under test, check)
Check = Tuple[str, str, Callable[[], Tuple[bool, str]]]
Suite = Callable[[int, np.random.Generator, int, int], List[Check]]


def random_cyclotomic(rng: np.random.Generator, terms: int = 3, max_den: int = 12) -> CyclotomicNumber:
    pairs = [(Fraction(int(rng.integers(0, d)), d), Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))))
             for d in map(int, rng.integers(1, max_den + 1, size=terms))]
    return CyclotomicNumber.from_terms(pairs)


def random_exact(rng: np.random.Generator) -> ExactScalar:
    return ExactScalar.from_terms((int(rng.integers(-2, 3)), random_cyclotomic(rng)) for _ in range(2))


def interior_angles(group: GroupKind, n: int, rng: np.random.Generator, size: int, margin: float = 0.05) -> EulerAngles:
    """Uniform draws strictly inside every nominal range."""
    layout = coordinate_layout(group, n)
    lows = np.array([c.low for c in layout])
    widths = np.array([c.width for c in layout])
    u = rng.uniform(margin, 1 - margin, size=(size, len(layout)))
    return EulerAngles.from_flat(group, n, lows + u * widths)


def random_entry_polynomial(rng: np.random.Generator, n: int, terms: int = 3, degree: int = 2) -> EntryPolynomial:
    """Random polynomial in entries and conjugated entries with small rational coefficients."""
    out = []
    for _ in range(terms):
        coeff = ExactScalar.rational(Fraction(int(rng.integers(-3, 4)) or 1, int(rng.integers(1, 4))))
        factors = tuple((int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1)), bool(rng.integers(0, 2)))
                        for _ in range(int(rng.integers(1, degree + 1))))
        out.append((coeff, factors))
    return EntryPolynomial(out, text="random")


def _mc_tolerance(stderr: float) -> float:
    return 5 * stderr + 1e-9


# Suites

def _exact_checks(n: int, rng: np.random.Generator, samples: int, draws: int) -> List[Check]:
    def idempotent():
        values = [random_cyclotomic(rng) for _ in range(20)]
        return all(normalize(normalize(v)) == normalize(v) for v in values), "20 random values"

    def embedding():
        worst = 0.0
        for _ in range(20):
            a, b = random_exact(rng), random_exact(rng)
            for exact, approx in ((a + b, complex(a) + complex(b)), (a * b, complex(a) * complex(b))):
                worst = max(worst, abs(complex(exact) - approx) / max(1.0, abs(approx)))
        return worst < 1e-10, f"max relative gap {worst:.2e}"

    def root_product():
        pairs = []
        for _ in range(200):
            p, q = (int(d) for d in rng.integers(1, 25, size=2))
            pairs.append((Fraction(int(rng.integers(0, p)), p), Fraction(int(rng.integers(0, q)), q)))
        ok = all(root_of_unity(r) * root_of_unity(s) == root_of_unity(r + s) for r, s in pairs)
        return ok, f"{len(pairs)} pairs with denominators up to 24"

    def self_difference():
        return all((a - a).is_zero() for a in (random_exact(rng) for _ in range(20))), "20 random values"

    def inverse():
        values = [v for v in (random_cyclotomic(rng, terms=2) for _ in range(20)) if not v.is_zero()]
        return all(v * v.inverse() == 1 for v in values), f"{len(values)} random values"

    return [
        ('exact-canonical-idempotent', "normalize(normalize(c)) = normalize(c)", idempotent),
        ('exact-embedding-homomorphism', "emb(a + b) = emb(a) + emb(b), emb(ab) = emb(a) emb(b)", embedding),
        ('exact-root-product', "zeta(r) zeta(s) = zeta(r + s)", root_product),
        ('exact-self-difference', "a - a = 0", self_difference),
        ('exact-inverse', "c c^-1 = 1 for c != 0", inverse),
    ]


def _generator_checks(n: int, rng: np.random.Generator, samples: int, draws: int) -> List[Check]:
    indices = range(1, n * n)

    def antihermitian():
        worst = max(max(np.max(np.abs(generator(n, j) + generator(n, j).conj().T)),
                        abs(np.trace(generator(n, j)))) for j in indices)
        return worst == 0, f"max defect {worst:.1e}"

    def orthogonal():
        worst = max(abs(trace_pairing(n, j, k)) for j in indices for k in indices if j != k)
        return worst == 0, f"max off-diagonal pairing {worst:.1e}"

    def exp_unitary():
        t = rng.uniform(-math.pi, math.pi, 16)
        worst = 0.0
        for j in indices:
            u = exp_generator(n, j, t)
            g = GroupElement(GroupKind.SU, u)
            worst = max(worst, g.unitarity_error(), g.det_error())
        return worst < 1e-12, f"max defect {worst:.1e}"

    def one_parameter():
        s, t = rng.uniform(-3, 3, 2)
        worst = max(np.max(np.abs(exp_generator(n, j, s + t) - exp_generator(n, j, s) @ exp_generator(n, j, t)))
                    for j in indices)
        return worst < 1e-12, f"max defect {worst:.1e}"

    def adjoint():
        worst = 0.0
        count = 0
        for _ in range(10):
            phi, psi = rng.uniform(0, 2 * math.pi, 2)
            for q in range(2, n):
                for relation in (1, 2):
                    worst = max(worst, ad_relation_residual(relation, n, q, phi, psi))
                    count += 1
                for p in range(q + 1, n):
                    for relation in (3, 4):
                        worst = max(worst, ad_relation_residual(relation, n, q, phi, psi, p=p))
                        count += 1
        return worst < 1e-12, f"{count} evaluations, max residual {worst:.1e}"

    return [
        ('generator-antihermitian', "lambda_j^* = -lambda_j, Tr lambda_j = 0", antihermitian),
        ('generator-trace-orthogonality', "Tr(lambda_j lambda_k) = 0 for j != k", orthogonal),
        ('generator-exp-unitary', "exp(t lambda_j) in SU(N)", exp_unitary),
        ('generator-one-parameter', "exp((s + t) lambda_j) = exp(s lambda_j) exp(t lambda_j)", one_parameter),
        ('adjoint-relations', "Ad(exp(-phi lambda_3)) lambda_{q^2+1} = cos(phi) lambda_{q^2+1} - sin(phi) lambda_{q^2} "
                              "and the companion relations", adjoint),
    ]


def _euler_checks(n: int, rng: np.random.Generator, samples: int, draws: int) -> List[Check]:
    def unitarity():
        worst = 0.0
        for group in GroupKind:
            g = forward(interior_angles(group, n, rng, 200))
            worst = max(worst, g.unitarity_error(), g.det_error())
        return worst < 1e-10, f"max defect {worst:.1e}"

    def round_trip():
        worst = 0.0
        for group, inv in ((GroupKind.SU, su_inverse), (GroupKind.SO, so_inverse)):
            batch = interior_angles(group, n, rng, draws)
            mats = forward(batch).matrix
            for i in range(draws):
                back = inv(GroupElement(group, mats[i]))
                worst = max(worst, float(np.max(np.abs(back.flat() - batch.take(i).flat()))))
        return worst < 1e-9, f"max angle error {worst:.1e}"

    def surjectivity():
        worst = 0.0
        seed = int(rng.integers(0, 2 ** 31))
        haar_su = unitary_group.rvs(n, size=draws, random_state=seed).reshape(draws, n, n)
        haar_so = special_ortho_group.rvs(n, size=draws, random_state=seed).reshape(draws, n, n)
        for u in haar_su:
            u = u / np.linalg.det(u) ** (1 / n)
            worst = max(worst, float(np.max(np.abs(forward(su_inverse(GroupElement(GroupKind.SU, u))).matrix - u))))
        for r in haar_so:
            worst = max(worst, float(np.max(np.abs(forward(so_inverse(GroupElement(GroupKind.SO, r))).matrix - r))))
        return worst < 1e-9, f"max reconstruction error {worst:.1e}"

    def shifts():
        worst = 0.0
        for _ in range(20):
            angles = interior_angles(GroupKind.SU, n, rng, 1).take(0)
            z = float(rng.uniform(-math.pi, math.pi))
            for kind in SHIFT_KINDS:
                if kind == 'DN-1-full' and n == 2:
                    continue
                worst = max(worst, shift_identity_residual(kind, n, z, angles))
        return worst < 1e-12, f"max residual {worst:.1e}"

    return [
        ('forward-unitarity', "F(theta)^* F(theta) = 1, det F(theta) = 1", unitarity),
        ('forward-inverse-round-trip', "F^-1(F(theta)) = theta inside the domain", round_trip),
        ('surjectivity', "F(F^-1(U)) = U for Haar-random U", surjectivity),
        ('shift-identities', "D(z) F(theta) = F(shifted theta)", shifts),
    ]


def _entry_mc(p: str, group: GroupKind, n: int, samples: int, seed: int) -> Tuple[complex, float]:
    poly = EntryPolynomial.parse(p)
    return mc_integrate(lambda a: poly.evaluate(forward(a, check_range=False).matrix), group, n, samples, seed)


def _haar_checks(n: int, rng: np.random.Generator, samples: int, draws: int) -> List[Check]:
    def normalized():
        ranks = range(2, n + 1)
        ok = all(normalization(g, m).is_normalized() for g in GroupKind for m in ranks)
        return ok, f"ranks 2..{n}"

    def schur():
        details, ok = [], True
        seed = int(rng.integers(0, 2 ** 31))
        for group in GroupKind:
            for text, expected in (('u11', 0.0), ('u11*conj(u11)', 1.0 / n)):
                mean, err = _entry_mc(text, group, n, samples, seed)
                good = abs(mean - expected) < _mc_tolerance(err)
                ok = ok and good
                details.append(f"{group.value}:{text}={mean.real:.4f}")
        return ok, ", ".join(details)

    def jacobian_ratio():
        details, ok = [], True
        for group in GroupKind:
            m = min(n, 3)
            angles = interior_angles(group, m, rng, 10, margin=0.1)
            ratios = [density_from_jacobian(group, m, angles.take(i)) / float(density(group, m, angles.take(i)))
                      for i in range(10)]
            spread = (max(ratios) - min(ratios)) / abs(np.mean(ratios))
            ok = ok and spread < 1e-4
            details.append(f"{group.value}({m}) spread {spread:.1e}")
        return ok, ", ".join(details)

    return [
        ('haar-normalization', "C_N * (integral of the density over the domain) = 1", normalized),
        ('haar-schur-moments', "E[u11] = 0, E[|u11|^2] = 1/N", schur),
        ('haar-density-jacobian', "sqrt(det(-1/2 Re Tr(X_a X_b))) / density is constant", jacobian_ratio),
    ]


def _finite_type_checks(n: int, rng: np.random.Generator, samples: int, draws: int) -> List[Check]:
    m = min(n, 4)

    def entries():
        worst = 0.0
        for group in GroupKind:
            table = symbolic_entries(group, m)
            angles = interior_angles(group, m, rng, 20)
            mats = forward(angles).matrix
            for i in range(m):
                for j in range(m):
                    worst = max(worst, float(np.max(np.abs(table[i][j].evaluate(angles) - mats[:, i, j]))))
        return worst < 1e-12, f"max entry error {worst:.1e}"

    def normalize_check():
        poly = random_entry_polynomial(rng, m)
        f = expand(poly, GroupKind.SU, m)
        angles = interior_angles(GroupKind.SU, m, rng, 20)
        same = f.normalize() == f
        gap = float(np.max(np.abs(f.normalize().evaluate(angles) - poly.evaluate(forward(angles).matrix))))
        return same and gap < 1e-12, f"evaluation gap {gap:.1e}"

    def unitarity_relations():
        ok = True
        for group in GroupKind:
            for i in range(1, m + 1):
                for j in range(1, m + 1):
                    text = " + ".join(f"u{i}{k}*conj(u{j}{k})" for k in range(1, m + 1))
                    text += " - 1" if i == j else ""
                    ok = ok and expand(EntryPolynomial.parse(text), group, m).is_zero()
        return ok, f"rank {m}"

    return [
        ('finite-type-entries', "expand(u_ij)(theta) = F(theta)_ij", entries),
        ('finite-type-normalize', "normalize(f) = f with unchanged values", normalize_check),
        ('finite-type-unitarity', "sum_k u_ik conj(u_jk) - delta_ij = 0", unitarity_relations),
    ]


def _abelian_checks(n: int, rng: np.random.Generator, samples: int, draws: int) -> List[Check]:
    cases = [(GroupKind.SU, 2), (GroupKind.SU, min(n, 3)), (GroupKind.SO, min(n, 3))]

    def substitution():
        worst = 0.0
        for group, m in cases:
            f = expand(random_entry_polynomial(rng, m), group, m)
            angles = interior_angles(group, m, rng, 20)
            worst = max(worst, float(np.max(np.abs(f.evaluate(angles) - tilde(f).evaluate_at_angles(angles)))))
        return worst < 1e-12, f"max gap {worst:.1e}"

    def constant():
        ok = all(integrate(AdmissibleFunction.constant(g, m, 1)) == ExactScalar.one() for g, m in cases)
        return ok, "constant 1 integrates to 1"

    def multiplicative():
        ok = True
        for group, m in cases:
            f = expand(random_entry_polynomial(rng, m, terms=2), group, m)
            g = expand(random_entry_polynomial(rng, m, terms=2), group, m)
            ok = ok and tilde(f * g) == tilde(f) * tilde(g)
        return ok, "random pairs"

    def moments():
        details, ok = [], True
        seed = int(rng.integers(0, 2 ** 31))
        for group, m in cases:
            f = expand(random_entry_polynomial(rng, m, terms=2, degree=2), group, m)
            adm = tilde(f)
            for power in (1, 2, 3):
                exact = complex(exact_moment(adm, power))
                mean, err = mc_integrate(lambda a: f.evaluate(a) ** power, group, m, samples, seed)
                good = abs(exact - mean) < _mc_tolerance(err)
                ok = ok and good
                details.append(f"{group.value}({m}) P={power}: {abs(exact - mean) / max(err, 1e-300):.1f} sigma")
        return ok, ", ".join(details)

    def sumset():
        checked = 0
        for group, m in cases:
            adm = tilde(expand(random_entry_polynomial(rng, m, terms=2, degree=2), group, m))
            base = set(spectrum(adm))
            for power in (2, 3):
                allowed = {tuple(map(sum, zip(*combo)))
                           for combo in itertools.combinations_with_replacement(base, power)}
                if not set(spectrum(adm ** power)) <= allowed:
                    return False, f"{group.value}({m}) P={power}: exponent outside the sumset"
                checked += 1
        return True, f"{checked} powers"

    return [
        ('abelian-substitution', "tilde f(x(theta), z(theta)) = f(theta)", substitution),
        ('abelian-normalization', "integral of J over the box and torus = 1", constant),
        ('abelian-multiplicative', "tilde(fg) = tilde(f) tilde(g)", multiplicative),
        ('abelian-moment-identity', "integral of f^P dg = integral of tilde(f)^P J dx dtheta", moments),
        ('abelian-spectrum-sumset', "spectrum(f^P) in the P-fold sumset of spectrum(f)", sumset),
    ]


def random_spectrum(rng: np.random.Generator, max_dim: int = 5, max_points: int = 20) -> List[Tuple[Fraction, ...]]:
    """Random rational point set; the shift makes both verdicts common."""
    d = int(rng.integers(1, max_dim + 1))
    k = int(rng.integers(1, max_points + 1))
    shift = int(rng.integers(0, 3))
    return [tuple(Fraction(int(rng.integers(-4, 5)) + shift, int(rng.integers(1, 3))) for _ in range(d))
            for _ in range(k)]


def _hull_checks(n: int, rng: np.random.Generator, samples: int, draws: int) -> List[Check]:
    def certificates():
        verified, mismatches = 0, 0
        for _ in range(draws):
            points = random_spectrum(rng)
            verdict = hull_contains_zero(points)
            verified += verdict.verified
            mismatches += verdict.contains_zero != basis_enumeration_contains_zero(points)
        return verified == draws and mismatches == 0, \
            f"{draws} spectra, {draws - verified} unverified, {mismatches} verdict mismatches"

    return [('hull-certificates', "exact verdict = basic-solution enumeration; certificate holds exactly",
             certificates)]


SUITES: Dict[str, Suite] = {
    'exact': _exact_checks,
    'generators': _generator_checks,
    'euler': _euler_checks,
    'haar': _haar_checks,
    'finite-type': _finite_type_checks,
    'abelian': _abelian_checks,
    'hull': _hull_checks,
}


def run_verification(n: int, suite: str = 'all', seed: Optional[int] = None,
                     samples: Optional[int] = None, draws: Optional[int] = None) -> VerificationReport:
    """Run one suite (or ``all``) at rank ``n``.

    ``samples`` is the Monte Carlo size of statistical checks, ``draws`` the
    number of random angle sets, matrices or spectra of the others.

    Raises:
        ValueError: For an unknown suite or a rank below 2.
    """
    if n < 2:
        raise ValueError(f"Rank must be at least 2, got {n}")
    settings.check_rank(n)
    names = list(SUITES) if suite == 'all' else [suite]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"Unknown suite: {unknown[0]!r} (expected one of all, {', '.join(SUITES)})")
    seed = settings.seed if seed is None else seed
    samples = samples or settings.verify_samples
    draws = draws or settings.verify_draws
    report = VerificationReport(n, seed)
    for name in names:
        rng = np.random.default_rng([seed, list(SUITES).index(name)])
        for tag, identity, check in SUITES[name](n, rng, samples, draws):
            try:
                passed, detail = check()
            except Exception as e:
                logger.exception(f"Check {tag} raised")
                passed, detail = False, f"{type(e).__name__}: {e}"
            report.checks.append(CheckResult(name, tag, bool(passed), detail, identity))
            logger.info(f"{name}/{tag}: {'pass' if passed else 'FAIL'} ({detail})")
    return report
