"""
Finite-type functions in canonical Euler-monomial form.

A monomial key is a flat tuple of integers following the coordinate layout.
Exponential coordinates take one slot (the frequency k of e^{ik theta}); the
trigonometric coordinates take two slots, a main power and an auxiliary
power. SU psi's use main = sin, aux = cos; the non-leading SO phi's use
main = cos, aux = sin. Canonical form keeps every auxiliary power in {0, 1}.
"""
from __future__ import annotations

import itertools
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.polyerrors import PolynomialError

from euler_haar.models.angles import Coordinate, CoordinateKind, EulerAngles, GroupKind, coordinate_layout
from euler_haar.models.exact import ExactScalar
from euler_haar.models.serialization import JsonRecord
from euler_haar.utils.errors import GuardError, ParseError
from euler_haar.utils.settings import settings

logger = logging.getLogger(__name__)

Key = Tuple[int, ...]


@dataclass(frozen=True)
class Slot:
    coord: Coordinate
    offset: int

    @property
    def trig(self) -> bool:
        return self.coord.trig


class MonomialLayout:
    """Slot positions of every coordinate of one group inside a monomial key."""

    def __init__(self, group: GroupKind, n: int):
        self.group = GroupKind.parse(group)
        self.n = n
        self.slots: List[Slot] = []
        offset = 0
        for coord in coordinate_layout(self.group, n):
            self.slots.append(Slot(coord, offset))
            offset += 2 if coord.trig else 1
        self.size = offset
        self._by_coord = {(s.coord.kind, s.coord.index): s for s in self.slots}
        self.main_name, self.aux_name = ('sin', 'cos') if self.group is GroupKind.SU else ('cos', 'sin')

    def slot(self, kind: CoordinateKind, index: int) -> Slot:
        return self._by_coord[(kind, index)]

    def unit(self, kind: CoordinateKind, index: int, power: int = 1, aux: bool = False) -> Key:
        """Key of a single power of one coordinate (frequency for exp slots)."""
        key = [0] * self.size
        slot = self.slot(kind, index)
        key[slot.offset + (1 if aux else 0)] = power
        return tuple(key)

    @property
    def zero_key(self) -> Key:
        return (0,) * self.size

    def trig_offsets(self) -> List[int]:
        return [s.offset for s in self.slots if s.trig]

    def exp_offsets(self) -> List[int]:
        return [s.offset for s in self.slots if not s.trig]

    def describe(self, key: Key) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for s in self.slots:
            if s.trig:
                main, aux = key[s.offset], key[s.offset + 1]
                if main or aux:
                    out[s.coord.name] = {self.main_name: main, self.aux_name: aux}
            elif key[s.offset]:
                out[s.coord.name] = key[s.offset]
        return out

    def parse_key(self, exponents: Mapping[str, Any]) -> Key:
        key = [0] * self.size
        names = {s.coord.name: s for s in self.slots}
        for name, value in exponents.items():
            if name not in names:
                raise ParseError(f"Unknown coordinate in monomial: {name!r}")
            s = names[name]
            try:
                if s.trig:
                    key[s.offset] = int(value.get(self.main_name, 0))
                    key[s.offset + 1] = int(value.get(self.aux_name, 0))
                else:
                    key[s.offset] = int(value)
            except (AttributeError, TypeError, ValueError) as e:
                raise ParseError(f"Invalid exponent for {name}: {value!r}") from e
        return tuple(key)

    def factor_values(self, angles: EulerAngles) -> List[Tuple[np.ndarray, Optional[np.ndarray]]]:
        """Per-slot bases: e^{i theta} for exp slots, (main, aux) for trig slots."""
        flat = angles.flat()
        values = []
        for axis, s in enumerate(self.slots):
            theta = flat[..., axis]
            if not s.trig:
                values.append((theta, None))
            elif self.group is GroupKind.SU:
                values.append((np.sin(theta), np.cos(theta)))
            else:
                values.append((np.cos(theta), np.sin(theta)))
        return values


@lru_cache(maxsize=None)
def monomial_layout(group: GroupKind, n: int) -> MonomialLayout:
    return MonomialLayout(GroupKind.parse(group), n)


def _add_keys(a: Key, b: Key) -> Key:
    return tuple(x + y for x, y in zip(a, b))


class FiniteTypeFunction(JsonRecord):
    """Finite sum of Euler monomials with exact coefficients.

    Arithmetic returns canonical (normalized) functions; zero coefficients are
    never stored.
    """

    def __init__(self, group: GroupKind, n: int, terms: Optional[Mapping[Key, ExactScalar]] = None,
                 normalized: bool = False):
        self.group = GroupKind.parse(group)
        self.n = n
        self.layout = monomial_layout(self.group, n)
        clean = {k: v for k, v in (terms or {}).items() if not v.is_zero()}
        self.terms: Dict[Key, ExactScalar] = clean if normalized else self._normalized_terms(clean)

    @classmethod
    def constant(cls, group: GroupKind, n: int, value: Any) -> 'FiniteTypeFunction':
        layout = monomial_layout(GroupKind.parse(group), n)
        return cls(group, n, {layout.zero_key: ExactScalar.coerce(value)}, normalized=True)

    @classmethod
    def monomial(cls, group: GroupKind, n: int, key: Key, coeff: Any = 1) -> 'FiniteTypeFunction':
        return cls(group, n, {tuple(key): ExactScalar.coerce(coeff)})

    def _normalized_terms(self, terms: Mapping[Key, ExactScalar]) -> Dict[Key, ExactScalar]:
        """Rewrite aux^2 as 1 - main^2 until every aux power is 0 or 1."""
        offsets = self.layout.trig_offsets()
        out: Dict[Key, ExactScalar] = {}
        for key, coeff in terms.items():
            expansions = []
            for o in offsets:
                q, r = divmod(key[o + 1], 2)
                if q == 0:
                    continue
                # aux^(2q + r) = aux^r * sum_i C(q, i) (-1)^i main^(2i)
                expansions.append([(o, r, 2 * i, (-1) ** i * math.comb(q, i)) for i in range(q + 1)])
            if not expansions:
                out[key] = out[key] + coeff if key in out else coeff
                continue
            for choice in itertools.product(*expansions):
                new = list(key)
                factor = 1
                for o, r, main_add, c in choice:
                    new[o] += main_add
                    new[o + 1] = r
                    factor *= c
                new_key = tuple(new)
                value = coeff * factor
                out[new_key] = out[new_key] + value if new_key in out else value
        out = {k: v for k, v in out.items() if not v.is_zero()}
        self._guard(len(out))
        return out

    @staticmethod
    def _guard(count: int) -> None:
        if count > settings.max_monomials:
            raise GuardError(f"Monomial count {count} exceeds the configured maximum {settings.max_monomials}")

    def _check_compatible(self, other: 'FiniteTypeFunction') -> None:
        if (self.group, self.n) != (other.group, other.n):
            raise ValueError(f"Cannot combine {self.group.value}({self.n}) with {other.group.value}({other.n})")

    def _lift(self, other: Any) -> 'FiniteTypeFunction':
        if isinstance(other, FiniteTypeFunction):
            self._check_compatible(other)
            return other
        return FiniteTypeFunction.constant(self.group, self.n, other)

    def normalize(self) -> 'FiniteTypeFunction':
        return FiniteTypeFunction(self.group, self.n, self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(k == self.layout.zero_key for k in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteTypeFunction):
            return NotImplemented
        return (self.group, self.n, self.terms) == (other.group, other.n, other.terms)

    def __add__(self, other: Any) -> 'FiniteTypeFunction':
        other = self._lift(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return FiniteTypeFunction(self.group, self.n, terms, normalized=True)

    __radd__ = __add__

    def __neg__(self) -> 'FiniteTypeFunction':
        return FiniteTypeFunction(self.group, self.n, {k: -v for k, v in self.terms.items()}, normalized=True)

    def __sub__(self, other: Any) -> 'FiniteTypeFunction':
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> 'FiniteTypeFunction':
        return self._lift(other) - self

    def __mul__(self, other: Any) -> 'FiniteTypeFunction':
        other = self._lift(other)
        if other.is_constant() and other.terms:
            scale = other.terms[self.layout.zero_key]
            return FiniteTypeFunction(self.group, self.n, {k: v * scale for k, v in self.terms.items()},
                                      normalized=True)
        self._guard(len(self.terms) * len(other.terms))
        terms: Dict[Key, ExactScalar] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = _add_keys(k1, k2)
                value = v1 * v2
                terms[key] = terms[key] + value if key in terms else value
        return FiniteTypeFunction(self.group, self.n, terms)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> 'FiniteTypeFunction':
        """Integer power by repeated squaring.

        Raises:
            ValueError: For negative powers.
        """
        if power < 0:
            raise ValueError(f"Powers must be nonnegative, got {power}")
        result = FiniteTypeFunction.constant(self.group, self.n, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def conjugate(self) -> 'FiniteTypeFunction':
        exp_offsets = self.layout.exp_offsets()
        terms = {}
        for key, coeff in self.terms.items():
            new = list(key)
            for o in exp_offsets:
                new[o] = -new[o]
            terms[tuple(new)] = coeff.conjugate()
        return FiniteTypeFunction(self.group, self.n, terms, normalized=True)

    def evaluate(self, angles: EulerAngles) -> np.ndarray:
        """Complex values at a (possibly batched) angle record."""
        if (angles.group, angles.n) != (self.group, self.n):
            raise ValueError("Angle record does not match the function's group")
        bases = self.layout.factor_values(angles)
        out = np.zeros(angles.batch_shape, dtype=complex)
        for key, coeff in self.terms.items():
            term = np.full(angles.batch_shape, complex(coeff))
            for s, (base, aux) in zip(self.layout.slots, bases):
                if s.trig:
                    main_power, aux_power = key[s.offset], key[s.offset + 1]
                    if main_power:
                        term = term * base ** main_power
                    if aux_power:
                        term = term * aux ** aux_power
                elif key[s.offset]:
                    term = term * np.exp(1j * key[s.offset] * base)
            out = out + term
        return out

    def to_dict(self, digits: int = 15) -> Dict[str, Any]:
        return {
            'group': self.group.value,
            'n': self.n,
            'terms': [{'exponents': self.layout.describe(k), 'coeff': v.to_dict(digits)}
                      for k, v in sorted(self.terms.items())],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'FiniteTypeFunction':
        try:
            group, n = GroupKind.parse(data['group']), int(data['n'])
            layout = monomial_layout(group, n)
            terms: Dict[Key, ExactScalar] = {}
            for entry in data['terms']:
                key = layout.parse_key(entry.get('exponents', {}))
                value = ExactScalar.from_dict(entry['coeff'])
                terms[key] = terms[key] + value if key in terms else value
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"Invalid finite-type function: {e}") from e
        return cls(group, n, terms)

    def __repr__(self) -> str:
        return f"<FiniteTypeFunction {self.group.value}({self.n}) terms={len(self.terms)}>"


# Entry polynomials

_CONJ_PATTERN = re.compile(r"conj\(\s*u(\d)(\d)\s*\)")
_SYMBOL_PATTERN = re.compile(r"^u(bar)?(\d)(\d)$")

EntryFactor = Tuple[int, int, bool]


@dataclass
class EntryPolynomial:
    """Polynomial in the matrix entries u_ij and their conjugates.

    ``terms`` holds (coefficient, factors) pairs; each factor is a 1-based
    (row, column, conjugated) triple.
    """

    terms: List[Tuple[ExactScalar, Tuple[EntryFactor, ...]]]
    text: str = ""

    @classmethod
    def parse(cls, text: str) -> 'EntryPolynomial':
        """Parse expressions such as ``u11*conj(u11) - 1/2`` (``I`` is the imaginary unit, ``^`` or ``**`` a power).

        Raises:
            ParseError: On syntax errors, unknown symbols or non-polynomial input.
        """
        source = _CONJ_PATTERN.sub(r"ubar\1\2", text)
        try:
            expr = parse_expr(source, transformations=standard_transformations + (convert_xor,), evaluate=True)
        except (SyntaxError, TypeError, ValueError, sympy.SympifyError) as e:
            raise ParseError(f"Cannot parse entry polynomial {text!r}: {e}") from e
        except Exception as e:
            logger.exception(f"Unexpected failure parsing {text!r}")
            raise ParseError(f"Cannot parse entry polynomial {text!r}") from e
        symbols = sorted(expr.free_symbols, key=lambda s: s.name)
        factors: List[EntryFactor] = []
        for sym in symbols:
            match = _SYMBOL_PATTERN.match(sym.name)
            if not match:
                raise ParseError(f"Unknown symbol {sym.name!r} in {text!r}; use u<i><j> and conj(u<i><j>)")
            factors.append((int(match.group(2)), int(match.group(3)), bool(match.group(1))))
        if not symbols:
            return cls([(cls._coefficient(expr, text), ())], text)
        try:
            poly = sympy.Poly(expr, *symbols)
        except PolynomialError as e:
            raise ParseError(f"{text!r} is not a polynomial in the matrix entries") from e
        terms = []
        for monom, coeff in poly.terms():
            entry: List[EntryFactor] = []
            for factor, power in zip(factors, monom):
                entry.extend([factor] * power)
            terms.append((cls._coefficient(coeff, text), tuple(entry)))
        return cls(terms, text)

    @staticmethod
    def _coefficient(value: Any, text: str) -> ExactScalar:
        value = sympy.nsimplify(value) if value.has(sympy.Float) else value
        re_part, im_part = sympy.re(value), sympy.im(value)
        if not (re_part.is_Rational and im_part.is_Rational):
            raise ParseError(f"Coefficients must be Gaussian rationals in {text!r}, got {value}")
        real = ExactScalar.rational(_fraction(re_part))
        imag = ExactScalar.rational(_fraction(im_part)) * ExactScalar.imaginary_unit()
        return real + imag

    def max_index(self) -> int:
        return max((max(i, j) for _, fs in self.terms for i, j, _ in fs), default=0)

    def evaluate(self, matrix: np.ndarray) -> np.ndarray:
        """Values on (possibly batched) matrices."""
        matrix = np.asarray(matrix)
        out = np.zeros(matrix.shape[:-2], dtype=complex)
        for coeff, factors in self.terms:
            term = np.full(matrix.shape[:-2], complex(coeff))
            for i, j, conj in factors:
                entry = matrix[..., i - 1, j - 1]
                term = term * (np.conj(entry) if conj else entry)
            out = out + term
        return out


def _fraction(value: Any) -> Fraction:
    return Fraction(int(value.p), int(value.q))
