"""
Symbolic expansion of the forward parametrizations.

Every factor matrix of the forward map has single-monomial entries, so the
entries of F_N are obtained by multiplying sparse matrices of finite-type
functions level by level.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Tuple

import numpy as np

from euler_haar.controllers.euler import forward
from euler_haar.models.angles import CoordinateKind, EulerAngles, GroupKind, phi_offset
from euler_haar.models.exact import ExactScalar
from euler_haar.models.finite_type import EntryPolynomial, FiniteTypeFunction, monomial_layout
from euler_haar.utils.settings import settings

logger = logging.getLogger(__name__)

Matrix = List[List[FiniteTypeFunction]]


def _identity(size: int, group: GroupKind, n: int) -> Matrix:
    return [[FiniteTypeFunction.constant(group, n, 1 if i == j else 0) for j in range(size)]
            for i in range(size)]


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    size = len(a)
    group, n = a[0][0].group, a[0][0].n
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = FiniteTypeFunction(group, n)
            for k in range(size):
                if a[i][k].is_zero() or b[k][j].is_zero():
                    continue
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def _embed(inner: Matrix, group: GroupKind, n: int) -> Matrix:
    size = len(inner) + 1
    out = _identity(size, group, n)
    for i, row in enumerate(inner):
        for j, value in enumerate(row):
            out[i][j] = value
    return out


def _su_level(n: int, m: int) -> Matrix:
    group = GroupKind.SU
    layout = monomial_layout(group, n)
    mono = lambda key, c=1: FiniteTypeFunction.monomial(group, n, key, c)
    offset = phi_offset(n, m)
    out = _identity(m, group, n)
    for k in range(2, m + 1):
        idx = offset + k - 2
        phase = _identity(m, group, n)
        phase[0][0] = mono(layout.unit(CoordinateKind.PHI, idx, 1))
        phase[1][1] = mono(layout.unit(CoordinateKind.PHI, idx, -1))
        rotation = _identity(m, group, n)
        cos = mono(layout.unit(CoordinateKind.PSI, idx, 1, aux=True))
        sin = mono(layout.unit(CoordinateKind.PSI, idx, 1))
        rotation[0][0] = rotation[k - 1][k - 1] = cos
        rotation[0][k - 1] = sin
        rotation[k - 1][0] = -sin
        out = _matmul(_matmul(out, phase), rotation)
    inner = _su_level(n, m - 1) if m > 2 else [[FiniteTypeFunction.constant(group, n, 1)]]
    last = _identity(m, group, n)
    for i in range(m - 1):
        last[i][i] = mono(layout.unit(CoordinateKind.OMEGA, m - 2, 1))
    last[m - 1][m - 1] = mono(layout.unit(CoordinateKind.OMEGA, m - 2, -(m - 1)))
    return _matmul(_matmul(out, _embed(inner, group, n)), last)


def _so_level(n: int, m: int) -> Matrix:
    group = GroupKind.SO
    layout = monomial_layout(group, n)
    mono = lambda key, c=1: FiniteTypeFunction.monomial(group, n, key, c)
    offset = phi_offset(n, m)
    half = ExactScalar.rational(Fraction(1, 2))
    i_half = half * ExactScalar.imaginary_unit()
    out = _identity(m, group, n)
    for k in range(1, m):
        idx = offset + k - 1
        if k == 1:
            up = layout.unit(CoordinateKind.PHI, idx, 1)
            down = layout.unit(CoordinateKind.PHI, idx, -1)
            cos = mono(up, half) + mono(down, half)
            sin = mono(up, -i_half) + mono(down, i_half)
        else:
            cos = mono(layout.unit(CoordinateKind.PHI, idx, 1))
            sin = mono(layout.unit(CoordinateKind.PHI, idx, 1, aux=True))
        rotation = _identity(m, group, n)
        rotation[k - 1][k - 1] = rotation[k][k] = cos
        rotation[k - 1][k] = sin
        rotation[k][k - 1] = -sin
        out = _matmul(out, rotation)
    if m == 2:
        return out
    return _matmul(out, _embed(_so_level(n, m - 1), group, n))


@lru_cache(maxsize=None)
def _symbolic_entries(group: GroupKind, n: int) -> Tuple[Tuple[FiniteTypeFunction, ...], ...]:
    logger.debug(f"Expanding the {group.value.upper()}({n}) parametrization symbolically")
    matrix = _su_level(n, n) if group is GroupKind.SU else _so_level(n, n)
    return tuple(tuple(row) for row in matrix)


def symbolic_entries(group: GroupKind, n: int) -> Tuple[Tuple[FiniteTypeFunction, ...], ...]:
    """Entries of the forward parametrization as canonical finite-type functions.

    Raises:
        GuardError: If ``n`` exceeds the configured rank.
    """
    group = GroupKind.parse(group)
    settings.check_rank(n)
    if n < 2:
        raise ValueError(f"Rank must be at least 2, got {n}")
    return _symbolic_entries(group, n)


def expand(polynomial: EntryPolynomial, group: GroupKind, n: int) -> FiniteTypeFunction:
    """Substitute the symbolic entries into an entry polynomial.

    Raises:
        ValueError: If an entry index exceeds ``n``.
    """
    group = GroupKind.parse(group)
    if polynomial.max_index() > n:
        raise ValueError(f"Entry index {polynomial.max_index()} exceeds N={n}")
    entries = symbolic_entries(group, n)
    conjugates: Dict[Tuple[int, int], FiniteTypeFunction] = {}
    result = FiniteTypeFunction(group, n)
    for coeff, factors in polynomial.terms:
        term = FiniteTypeFunction.constant(group, n, coeff)
        for i, j, conj in factors:
            if conj:
                if (i, j) not in conjugates:
                    conjugates[(i, j)] = entries[i - 1][j - 1].conjugate()
                term = term * conjugates[(i, j)]
            else:
                term = term * entries[i - 1][j - 1]
        result = result + term
    return result


def entry_function(polynomial: EntryPolynomial, group: GroupKind, n: int) -> Callable[[EulerAngles], np.ndarray]:
    """Numeric evaluator angles -> p(F(angles)), for the integrators."""
    group = GroupKind.parse(group)
    if polynomial.max_index() > n:
        raise ValueError(f"Entry index {polynomial.max_index()} exceeds N={n}")
    return lambda angles: polynomial.evaluate(forward(angles, check_range=False).matrix)
