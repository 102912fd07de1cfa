"""
Admissible functions: Laurent polynomials in z with rational exponents whose
coefficients are polynomials in x and sqrt(1 - x^2).

Each exponential Euler coordinate becomes one z variable, with exponents
divided by the coordinate's divisor. Each trigonometric coordinate becomes
one x variable: x = sin(psi) on [0, 1] for SU, x = cos(phi) on [-1, 1] for SO.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from euler_haar.models.angles import EulerAngles, GroupKind
from euler_haar.models.exact import ExactScalar, format_rational, parse_rational
from euler_haar.models.finite_type import monomial_layout
from euler_haar.models.serialization import JsonRecord, parsing
from euler_haar.utils.errors import GuardError, ParseError
from euler_haar.utils.settings import settings

ZKey = Tuple[Fraction, ...]
# per x variable: (power of x, power of sqrt(1 - x^2))
XKey = Tuple[Tuple[int, int], ...]
Coefficient = Dict[XKey, ExactScalar]
Spectrum = List[ZKey]


def _guard(count: int) -> None:
    if count > settings.max_monomials:
        raise GuardError(f"Monomial count {count} exceeds the configured maximum {settings.max_monomials}")


class AdmissibleFunction(JsonRecord):
    """Sum over z-exponent vectors m of c_m(x) z^m.

    ``terms`` maps m to its coefficient polynomial; a polynomial maps x keys
    to exact coefficients. Square-root powers are kept in {0, 1}.
    """

    def __init__(self, group: GroupKind, n: int, terms: Optional[Mapping[ZKey, Mapping[XKey, ExactScalar]]] = None,
                 normalized: bool = False):
        self.group = GroupKind.parse(group)
        self.n = n
        layout = monomial_layout(self.group, n)
        self.divisors: Tuple[int, ...] = tuple(s.coord.divisor for s in layout.slots if not s.trig)
        self.x_count = sum(1 for s in layout.slots if s.trig)
        self.z_count = len(self.divisors)
        self.terms: Dict[ZKey, Coefficient] = {}
        for m, poly in (terms or {}).items():
            clean = dict(poly) if normalized else self._normalized_poly(poly)
            clean = {k: v for k, v in clean.items() if not v.is_zero()}
            if clean:
                self.terms[tuple(Fraction(q) for q in m)] = clean
        _guard(sum(len(p) for p in self.terms.values()))

    @staticmethod
    def _normalized_poly(poly: Mapping[XKey, ExactScalar]) -> Coefficient:
        """Rewrite (sqrt(1 - x^2))^2 as 1 - x^2."""
        out: Coefficient = {}
        for xkey, coeff in poly.items():
            options = []
            for a, c in xkey:
                q, r = divmod(c, 2)
                options.append([((a + 2 * i, r), (-1) ** i * math.comb(q, i)) for i in range(q + 1)])
            for choice in itertools.product(*options):
                key = tuple(pair for pair, _ in choice)
                factor = 1
                for _, c in choice:
                    factor *= c
                value = coeff * factor
                out[key] = out[key] + value if key in out else value
        return out

    @classmethod
    def constant(cls, group: GroupKind, n: int, value: Any) -> 'AdmissibleFunction':
        empty = cls(group, n)
        value = ExactScalar.coerce(value)
        if value.is_zero():
            return empty
        zero_m = (Fraction(0),) * empty.z_count
        zero_x = ((0, 0),) * empty.x_count
        return cls(group, n, {zero_m: {zero_x: value}}, normalized=True)

    def _check(self, other: 'AdmissibleFunction') -> None:
        if (self.group, self.n) != (other.group, other.n):
            raise ValueError("Admissible functions belong to different groups")

    def is_zero(self) -> bool:
        return not self.terms

    def term_count(self) -> int:
        return sum(len(p) for p in self.terms.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdmissibleFunction):
            return NotImplemented
        return (self.group, self.n, self.terms) == (other.group, other.n, other.terms)

    def __add__(self, other: 'AdmissibleFunction') -> 'AdmissibleFunction':
        self._check(other)
        terms = {m: dict(p) for m, p in self.terms.items()}
        for m, poly in other.terms.items():
            target = terms.setdefault(m, {})
            for k, v in poly.items():
                target[k] = target[k] + v if k in target else v
        return AdmissibleFunction(self.group, self.n, terms, normalized=True)

    def __neg__(self) -> 'AdmissibleFunction':
        return AdmissibleFunction(self.group, self.n,
                                  {m: {k: -v for k, v in p.items()} for m, p in self.terms.items()},
                                  normalized=True)

    def __sub__(self, other: 'AdmissibleFunction') -> 'AdmissibleFunction':
        return self + (-other)

    def __mul__(self, other: 'AdmissibleFunction') -> 'AdmissibleFunction':
        self._check(other)
        _guard(self.term_count() * other.term_count())
        terms: Dict[ZKey, Coefficient] = {}
        for m1, p1 in self.terms.items():
            for m2, p2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                target = terms.setdefault(m, {})
                for k1, v1 in p1.items():
                    for k2, v2 in p2.items():
                        k = tuple((a1 + a2, c1 + c2) for (a1, c1), (a2, c2) in zip(k1, k2))
                        value = v1 * v2
                        target[k] = target[k] + value if k in target else value
        return AdmissibleFunction(self.group, self.n, terms)

    def __pow__(self, power: int) -> 'AdmissibleFunction':
        if power < 0:
            raise ValueError(f"Powers must be nonnegative, got {power}")
        result = AdmissibleFunction.constant(self.group, self.n, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def spectrum(self) -> Spectrum:
        """Exponent vectors with a nonzero coefficient polynomial, sorted."""
        return sorted(self.terms)

    def evaluate(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """Values at x and z = e^{i theta}; z^q is taken as e^{i q theta} with theta in [0, 2 pi)."""
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        batch = theta.shape[:-1] if self.z_count else x.shape[:-1]
        root = np.sqrt(np.clip(1 - x ** 2, 0, None))
        out = np.zeros(batch, dtype=complex)
        for m, poly in self.terms.items():
            phase = np.exp(1j * sum(float(q) * theta[..., v] for v, q in enumerate(m) if q))
            for xkey, coeff in poly.items():
                value = np.full(batch, complex(coeff))
                for v, (a, c) in enumerate(xkey):
                    if a:
                        value = value * x[..., v] ** a
                    if c:
                        value = value * root[..., v] ** c
                out = out + value * phase
        return out

    def evaluate_at_angles(self, angles: EulerAngles) -> np.ndarray:
        """Values at the substitution point of an Euler angle record."""
        layout = monomial_layout(self.group, self.n)
        flat = angles.flat()
        xs, thetas = [], []
        for axis, s in enumerate(layout.slots):
            value = flat[..., axis]
            if s.trig:
                xs.append(np.sin(value) if self.group is GroupKind.SU else np.cos(value))
            else:
                thetas.append(np.mod(s.coord.divisor * value, 2 * math.pi))
        batch = angles.batch_shape
        x = np.stack(xs, axis=-1) if xs else np.zeros(batch + (0,))
        theta = np.stack(thetas, axis=-1) if thetas else np.zeros(batch + (0,))
        return self.evaluate(x, theta)

    def to_dict(self, digits: int = 15) -> Dict[str, Any]:
        return {
            'group': self.group.value,
            'n': self.n,
            'x_vars': self.x_count,
            'z_vars': self.z_count,
            'terms': [
                {
                    'm': [format_rational(q) for q in m],
                    'c': [{'x': [list(pair) for pair in k], 'coeff': v.to_dict(digits)}
                          for k, v in sorted(poly.items())],
                }
                for m, poly in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AdmissibleFunction':
        try:
            group, n = GroupKind.parse(data['group']), int(data['n'])
            terms: Dict[ZKey, Coefficient] = {}
            for entry in data['terms']:
                m = tuple(parse_rational(q) for q in entry['m'])
                poly = terms.setdefault(m, {})
                for part in entry['c']:
                    key = tuple((int(a), int(c)) for a, c in part['x'])
                    value = ExactScalar.from_dict(part['coeff'])
                    poly[key] = poly[key] + value if key in poly else value
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"Invalid admissible function: {e}") from e
        result = cls(group, n, terms)
        for m in result.terms:
            if len(m) != result.z_count:
                raise ParseError(f"Exponent vector {m} has {len(m)} entries, expected {result.z_count}")
        return result

    def __repr__(self) -> str:
        return f"<AdmissibleFunction {self.group.value}({self.n}) terms={self.term_count()}>"


@dataclass
class JacobianJ(JsonRecord):
    """Weight of the abelian-side integral: constant * prod x^a (1 - x^2)^(c/2).

    ``factors`` holds (a, c) per x variable.
    """

    group: GroupKind
    n: int
    factors: List[Tuple[int, int]]
    constant: ExactScalar
    published_constant: ExactScalar

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        root = np.sqrt(np.clip(1 - x ** 2, 0, None))
        out = np.full(x.shape[:-1], complex(self.constant).real)
        for v, (a, c) in enumerate(self.factors):
            out = out * x[..., v] ** a * root[..., v] ** c
        return out

    def to_dict(self, digits: int = 15) -> Dict[str, Any]:
        return {
            'group': self.group.value,
            'n': self.n,
            'factors': [{'x_power': a, 'sqrt_power': c} for a, c in self.factors],
            'constant': self.constant.to_dict(digits),
            'published_constant': self.published_constant.to_dict(digits),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'JacobianJ':
        with parsing("Jacobian record"):
            return cls(
                GroupKind.parse(data['group']),
                int(data['n']),
                [(int(f['x_power']), int(f['sqrt_power'])) for f in data['factors']],
                ExactScalar.from_dict(data['constant']),
                ExactScalar.from_dict(data['published_constant']),
            )
