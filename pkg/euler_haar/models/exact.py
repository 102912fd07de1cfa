"""
Exact scalars.

Rationals are plain ``fractions.Fraction`` values. A :class:`CyclotomicNumber`
is a rational combination of roots of unity held in a unique normal form, and
an :class:`ExactScalar` is a finite Laurent polynomial in pi whose coefficients
are cyclotomic numbers. Normalization constants and every closed-form integral
computed by the package are values of this ring.
"""
from __future__ import annotations

import cmath
import logging
import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Any, Dict, Iterable, List, Mapping, Tuple, Union

import mpmath
import sympy

from euler_haar.models.serialization import JsonRecord
from euler_haar.utils.errors import GuardError, NonInvertibleError, ParseError
from euler_haar.utils.settings import settings

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, 'CyclotomicNumber', 'ExactScalar']


def parse_rational(value: Any) -> Fraction:
    """Parse ``"p/q"`` strings, integers and fractions into a reduced Fraction.

    Raises:
        ParseError: If the value is not an exact rational.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"Invalid rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"Invalid rational: {value!r}") from e
    raise ParseError(f"Invalid rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Format a rational as ``"p/q"`` (denominator always written)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


# Cyclotomic normal form
#
# Q(zeta_L) is the tensor product of the fields Q(zeta_q) over the prime powers
# q = p^k exactly dividing L. Values are kept in the product basis
# prod_i zeta_{q_i}^{a_i}, 0 <= a_i < phi(q_i), at the smallest L containing
# them; a basis element sits at exponent sum_i a_i/q_i mod 1.

Index = Tuple[int, ...]


@lru_cache(maxsize=None)
def _prime_powers(order: int) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted(sympy.factorint(order).items()))


@lru_cache(maxsize=None)
def _cyclotomic_modulus(order: int) -> sympy.Poly:
    x = sympy.Symbol('x')
    return sympy.Poly(sympy.cyclotomic_poly(order, x), x, domain=sympy.QQ)


def _split(r: Fraction, order: int, moduli: List[int]) -> Index:
    """Exponents a_i with r = sum_i a_i/q_i mod 1."""
    j = int(r * order) % order
    return tuple(j * pow(order // q, -1, q) % q for q in moduli)


def _reduce_axis(terms: Dict[Index, Fraction], axis: int, p: int, q: int) -> Dict[Index, Fraction]:
    """Rewrite zeta_q^((p-1)s + t) as -sum_{m < p-1} zeta_q^(ms + t), s = q/p."""
    s = q // p
    top = (p - 1) * s
    out: Dict[Index, Fraction] = {}
    for index, c in terms.items():
        a = index[axis]
        if a < top:
            out[index] = out.get(index, Fraction(0)) + c
            continue
        for m in range(p - 1):
            moved = index[:axis] + (m * s + a - top,) + index[axis + 1:]
            out[moved] = out.get(moved, Fraction(0)) - c
    return {index: c for index, c in out.items() if c}


def _descend_axis(terms: Dict[Index, Fraction], axis: int, p: int, k: int) -> Tuple[Dict[Index, Fraction], int]:
    """Lower the p-part of the order while the value lies in the smaller field."""
    while k > 1 and all(index[axis] % p == 0 for index in terms):
        terms = {index[:axis] + (index[axis] // p,) + index[axis + 1:]: c for index, c in terms.items()}
        k -= 1
    # reduced exponents at q = p are 0..p-2 and only 0 is fixed
    if k == 1 and all(index[axis] == 0 for index in terms):
        k = 0
    return terms, k


def _canonical(pairs: Iterable[Tuple[Any, Any]]) -> Tuple[Tuple[Fraction, Fraction], ...]:
    """Canonical term tuple of sum c * e^{2 pi i r} over the given (r, c) pairs."""
    acc: Dict[Fraction, Fraction] = {}
    for r, c in pairs:
        if c:
            key = Fraction(r) % 1
            acc[key] = acc.get(key, Fraction(0)) + Fraction(c)
    acc = {r: c for r, c in acc.items() if c}
    if not acc:
        return ()
    order = reduce(lambda a, b: a * b // math.gcd(a, b), (r.denominator for r in acc), 1)
    if order == 1:
        return ((Fraction(0), acc[Fraction(0)]),)
    if order > settings.max_cyclotomic_order:
        raise GuardError(
            f"Cyclotomic order {order} exceeds the configured maximum {settings.max_cyclotomic_order}")
    factors = _prime_powers(order)
    moduli = [p ** k for p, k in factors]
    terms: Dict[Index, Fraction] = {}
    for r, c in acc.items():
        index = _split(r, order, moduli)
        terms[index] = terms.get(index, Fraction(0)) + c
    for axis, (p, k) in enumerate(factors):
        terms = _reduce_axis(terms, axis, p, moduli[axis])
        terms, k = _descend_axis(terms, axis, p, k)
        moduli[axis] = p ** k
    out = {sum((Fraction(a, q) for a, q in zip(index, moduli)), Fraction(0)) % 1: c
           for index, c in terms.items()}
    return tuple(sorted(out.items()))


class CyclotomicNumber:
    """Finite rational combination of roots of unity in canonical form.

    ``terms`` maps exponents r in [0, 1) to rational coefficients, meaning
    sum c_r e^{2 pi i r}. The form is unique, so equality is structural and
    zero is the empty map.
    """

    __slots__ = ('terms',)

    def __init__(self, terms: Tuple[Tuple[Fraction, Fraction], ...] = ()):
        object.__setattr__(self, 'terms', terms)

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicNumber is immutable")

    @classmethod
    def from_terms(cls, pairs: Union[Mapping[Any, Any], Iterable[Tuple[Any, Any]]]) -> 'CyclotomicNumber':
        """Build a canonical value from (exponent, coefficient) pairs."""
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        return cls(_canonical(pairs))

    @classmethod
    def rational(cls, value: Union[int, Fraction]) -> 'CyclotomicNumber':
        value = Fraction(value)
        return cls(((Fraction(0), value),) if value else ())

    @classmethod
    def coerce(cls, value: Any) -> 'CyclotomicNumber':
        if isinstance(value, CyclotomicNumber):
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return cls.rational(value)
        raise TypeError(f"Cannot convert {type(value).__name__} to CyclotomicNumber")

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b // math.gcd(a, b), (r.denominator for r, _ in self.terms), 1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self.pretty()} is not rational")
        return self.terms[0][1] if self.terms else Fraction(0)

    def __eq__(self, other: object) -> bool:
        try:
            other = CyclotomicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __add__(self, other: Any) -> 'CyclotomicNumber':
        other = CyclotomicNumber.coerce(other)
        if self.is_rational() and other.is_rational():
            return CyclotomicNumber.rational(self.rational_value() + other.rational_value())
        return CyclotomicNumber.from_terms(list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self) -> 'CyclotomicNumber':
        return CyclotomicNumber(tuple((r, -c) for r, c in self.terms))

    def __sub__(self, other: Any) -> 'CyclotomicNumber':
        return self + (-CyclotomicNumber.coerce(other))

    def __rsub__(self, other: Any) -> 'CyclotomicNumber':
        return CyclotomicNumber.coerce(other) - self

    def __mul__(self, other: Any) -> 'CyclotomicNumber':
        other = CyclotomicNumber.coerce(other)
        if self.is_rational() and other.is_rational():
            return CyclotomicNumber.rational(self.rational_value() * other.rational_value())
        if other.is_rational():
            q = other.rational_value()
            return CyclotomicNumber(tuple((r, c * q) for r, c in self.terms) if q else ())
        if self.is_rational():
            return other * self
        return CyclotomicNumber.from_terms(
            ((r1 + r2, c1 * c2) for r1, c1 in self.terms for r2, c2 in other.terms))

    __rmul__ = __mul__

    def conjugate(self) -> 'CyclotomicNumber':
        return CyclotomicNumber.from_terms((-r, c) for r, c in self.terms)

    def inverse(self) -> 'CyclotomicNumber':
        """Multiplicative inverse by polynomial inversion modulo the cyclotomic polynomial."""
        if self.is_zero():
            raise NonInvertibleError("Zero has no inverse")
        if self.is_rational():
            return CyclotomicNumber.rational(1 / self.rational_value())
        order = self.order
        modulus = _cyclotomic_modulus(order)
        value = sympy.Poly.from_dict(
            {(int(r * order),): sympy.Rational(c.numerator, c.denominator) for r, c in self.terms},
            modulus.gens[0], domain=sympy.QQ)
        inverse = value.invert(modulus)
        return CyclotomicNumber.from_terms(
            (Fraction(k, order), Fraction(int(c.p), int(c.q))) for (k,), c in inverse.terms())

    def __truediv__(self, other: Any) -> 'CyclotomicNumber':
        return self * CyclotomicNumber.coerce(other).inverse()

    def to_complex(self, digits: int = 15) -> mpmath.mpc:
        with mpmath.workdps(digits + 10):
            total = mpmath.mpc(0)
            for r, c in self.terms:
                angle = 2 * mpmath.mpf(r.numerator) / r.denominator
                total += mpmath.mpf(c.numerator) / c.denominator * mpmath.expjpi(angle)
            return +total

    def __complex__(self) -> complex:
        return sum((float(c) * cmath.exp(2j * math.pi * float(r)) for r, c in self.terms), 0j)

    def to_list(self) -> List[List[str]]:
        return [[format_rational(r), format_rational(c)] for r, c in self.terms]

    @classmethod
    def from_list(cls, data: Iterable[Iterable[Any]]) -> 'CyclotomicNumber':
        try:
            return cls.from_terms((parse_rational(r), parse_rational(c)) for r, c in data)
        except (TypeError, ValueError) as e:
            raise ParseError(f"Invalid cyclotomic number: {data!r}") from e

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for r, c in self.terms:
            parts.append(str(c) if r == 0 else f"{c}*zeta({r})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"CyclotomicNumber({self.pretty()})"


def root_of_unity(r: Union[int, Fraction, str]) -> CyclotomicNumber:
    """Canonical e^{2 pi i r}."""
    return CyclotomicNumber.from_terms([(parse_rational(r), Fraction(1))])


def normalize(value: CyclotomicNumber) -> CyclotomicNumber:
    """Re-canonicalize a cyclotomic number (idempotent)."""
    return CyclotomicNumber.from_terms(value.terms)


class ExactScalar(JsonRecord):
    """Element of Q(zeta)[pi, 1/pi], pi treated as transcendental.

    ``pi_terms`` is a sorted tuple of (power, CyclotomicNumber) pairs with no
    zero coefficients.
    """

    __slots__ = ('pi_terms',)

    def __init__(self, pi_terms: Tuple[Tuple[int, CyclotomicNumber], ...] = ()):
        object.__setattr__(self, 'pi_terms', pi_terms)

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    @classmethod
    def from_terms(cls, pairs: Union[Mapping[int, Any], Iterable[Tuple[int, Any]]]) -> 'ExactScalar':
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        acc: Dict[int, CyclotomicNumber] = {}
        for power, value in pairs:
            value = CyclotomicNumber.coerce(value)
            if value.is_zero():
                continue
            acc[int(power)] = acc[int(power)] + value if int(power) in acc else value
        return cls(tuple(sorted((p, c) for p, c in acc.items() if not c.is_zero())))

    @classmethod
    def coerce(cls, value: Any) -> 'ExactScalar':
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, CyclotomicNumber):
            return cls(((0, value),) if not value.is_zero() else ())
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return cls.rational(value)
        raise TypeError(f"Cannot convert {type(value).__name__} to ExactScalar")

    @classmethod
    def rational(cls, value: Union[int, Fraction, str]) -> 'ExactScalar':
        value = parse_rational(value) if isinstance(value, str) else Fraction(value)
        return cls(((0, CyclotomicNumber.rational(value)),) if value else ())

    @classmethod
    def zero(cls) -> 'ExactScalar':
        return cls()

    @classmethod
    def one(cls) -> 'ExactScalar':
        return cls.rational(1)

    @classmethod
    def pi(cls, power: int = 1) -> 'ExactScalar':
        return cls(((int(power), CyclotomicNumber.rational(1)),))

    @classmethod
    def root_of_unity(cls, r: Union[int, Fraction, str]) -> 'ExactScalar':
        return cls.coerce(root_of_unity(r))

    @classmethod
    def imaginary_unit(cls) -> 'ExactScalar':
        return cls.root_of_unity(Fraction(1, 4))

    def is_zero(self) -> bool:
        return not self.pi_terms

    def is_rational(self) -> bool:
        return not self.pi_terms or (
            len(self.pi_terms) == 1 and self.pi_terms[0][0] == 0 and self.pi_terms[0][1].is_rational())

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self.pretty()} is not rational")
        return self.pi_terms[0][1].rational_value() if self.pi_terms else Fraction(0)

    def __eq__(self, other: object) -> bool:
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.pi_terms == other.pi_terms

    def __hash__(self) -> int:
        return hash(self.pi_terms)

    def __add__(self, other: Any) -> 'ExactScalar':
        other = ExactScalar.coerce(other)
        if not other.pi_terms:
            return self
        if not self.pi_terms:
            return other
        return ExactScalar.from_terms(list(self.pi_terms) + list(other.pi_terms))

    __radd__ = __add__

    def __neg__(self) -> 'ExactScalar':
        return ExactScalar(tuple((p, -c) for p, c in self.pi_terms))

    def __sub__(self, other: Any) -> 'ExactScalar':
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other: Any) -> 'ExactScalar':
        return ExactScalar.coerce(other) - self

    def __mul__(self, other: Any) -> 'ExactScalar':
        other = ExactScalar.coerce(other)
        if not self.pi_terms or not other.pi_terms:
            return ExactScalar()
        return ExactScalar.from_terms(
            (p1 + p2, c1 * c2) for p1, c1 in self.pi_terms for p2, c2 in other.pi_terms)

    __rmul__ = __mul__

    def inverse(self) -> 'ExactScalar':
        """Inverse of a single-power scalar.

        Raises:
            NonInvertibleError: For zero or for sums of several pi powers.
        """
        if len(self.pi_terms) != 1:
            raise NonInvertibleError(f"{self.pretty()} is not invertible")
        power, value = self.pi_terms[0]
        return ExactScalar(((-power, value.inverse()),))

    def __truediv__(self, other: Any) -> 'ExactScalar':
        return self * ExactScalar.coerce(other).inverse()

    def __rtruediv__(self, other: Any) -> 'ExactScalar':
        return ExactScalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> 'ExactScalar':
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = ExactScalar.one(), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> 'ExactScalar':
        return ExactScalar(tuple((p, c.conjugate()) for p, c in self.pi_terms))

    def to_complex(self, digits: int = 15) -> Tuple[mpmath.mpf, mpmath.mpf]:
        """Embed into the complex numbers with error below 10^-digits.

        Raises:
            ValueError: If ``digits`` exceeds the configured maximum.
        """
        if digits < 1 or digits > settings.max_digits:
            raise ValueError(f"Requested {digits} digits; supported range is 1..{settings.max_digits}")
        with mpmath.workdps(digits + 10):
            total = mpmath.mpc(0)
            for power, value in self.pi_terms:
                total += value.to_complex(digits + 10) * mpmath.pi ** power
            return +total.real, +total.imag

    def __complex__(self) -> complex:
        return sum((complex(c) * math.pi ** p for p, c in self.pi_terms), 0j)

    def float_shadow(self, digits: int = 15) -> List[float]:
        """[re, im] rounded to ``digits`` significant digits."""
        re, im = self.to_complex(digits)
        return [float(mpmath.nstr(re, digits)), float(mpmath.nstr(im, digits))]

    def to_list(self) -> List[List[Any]]:
        return [[p, c.to_list()] for p, c in self.pi_terms]

    @classmethod
    def from_list(cls, data: Iterable[Iterable[Any]]) -> 'ExactScalar':
        try:
            return cls.from_terms((int(p), CyclotomicNumber.from_list(c)) for p, c in data)
        except (TypeError, ValueError) as e:
            raise ParseError(f"Invalid exact scalar: {data!r}") from e

    def to_dict(self, digits: int = 15) -> Dict[str, Any]:
        return {'exact': self.to_list(), 'pretty': self.pretty(), 'float': self.float_shadow(digits)}

    @classmethod
    def from_dict(cls, data: Any) -> 'ExactScalar':
        """Read the exact part of a ``to_dict`` record (or a bare term list); the float shadow is ignored."""
        if isinstance(data, Mapping):
            if 'exact' not in data:
                raise ParseError(f"Exact scalar record has no 'exact' field: {data!r}")
            data = data['exact']
        return cls.from_list(data)

    def pretty(self) -> str:
        if not self.pi_terms:
            return "0"
        parts = []
        for power, value in self.pi_terms:
            coeff = value.pretty()
            if len(value.terms) > 1:
                coeff = f"({coeff})"
            parts.append(coeff if power == 0 else f"{coeff}*pi^{power}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"ExactScalar({self.pretty()})"


def to_complex(value: ExactScalar, digits: int) -> Tuple[mpmath.mpf, mpmath.mpf]:
    return value.to_complex(digits)


def arith(a: Number, b: Number, op: str) -> ExactScalar:
    """Exact ring operation ``op`` in {"add", "sub", "mul", "div"}."""
    a, b = ExactScalar.coerce(a), ExactScalar.coerce(b)
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    if op == 'div':
        return a / b
    raise ValueError(f"Unknown operation: {op}")


# Gamma and Beta at half-integers

@lru_cache(maxsize=None)
def gamma_half(s: Fraction) -> Tuple[Fraction, int]:
    """Gamma(s) for positive s in (1/2)Z, as (rational, power of sqrt(pi))."""
    s = Fraction(s)
    if s <= 0 or s.denominator not in (1, 2):
        raise ValueError(f"Gamma is only tabulated at positive half-integers, got {s}")
    value = sympy.gamma(sympy.Rational(s.numerator, s.denominator))
    if s.denominator == 1:
        return Fraction(int(value.p), int(value.q)), 0
    ratio = sympy.simplify(value / sympy.sqrt(sympy.pi))
    return Fraction(int(ratio.p), int(ratio.q)), 1


@lru_cache(maxsize=None)
def beta(a: Fraction, b: Fraction) -> ExactScalar:
    """Exact B(a, b) for positive half-integers; the value lies in Q + Q*pi."""
    ga, pa = gamma_half(Fraction(a))
    gb, pb = gamma_half(Fraction(b))
    gab, pab = gamma_half(Fraction(a) + Fraction(b))
    half_powers = pa + pb - pab
    if half_powers % 2:
        raise ValueError(f"B({a}, {b}) leaves an odd power of sqrt(pi)")
    return ExactScalar.rational(ga * gb / gab) * ExactScalar.pi(half_powers // 2)
