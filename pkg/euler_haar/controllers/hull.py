"""
Exact convex-hull membership of the origin.

Phase I of the simplex method over the rationals decides whether
{lambda >= 0, sum lambda = 1, sum lambda_i p_i = 0} is feasible. Bland's rule
prevents cycling. When infeasible, the phase-I duals give a separating
normal h with h . p > 0 for every point.
"""
import itertools
import logging
import math
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np

from euler_haar.models.reports import HullVerdict, Point

logger = logging.getLogger(__name__)


def _phase_one(points: List[Point]) -> Tuple[List[List[Fraction]], List[int]]:
    """Run phase I; returns the final tableau and basis."""
    k, d = len(points), len(points[0])
    rows = d + 1
    width = k + rows
    tableau: List[List[Fraction]] = []
    for r in range(rows):
        row = [Fraction(points[i][r]) if r < d else Fraction(1) for i in range(k)]
        row += [Fraction(1) if c == r else Fraction(0) for c in range(rows)]
        row.append(Fraction(1) if r == d else Fraction(0))
        tableau.append(row)
    basis = [k + r for r in range(rows)]
    cost = [Fraction(0)] * k + [Fraction(1)] * rows

    while True:
        reduced = _reduced_costs(tableau, basis, cost, width)
        entering = next((j for j in range(width) if reduced[j] < 0), None)
        if entering is None:
            return tableau, basis
        best: Optional[Tuple[Fraction, int, int]] = None
        for r in range(rows):
            a = tableau[r][entering]
            if a > 0:
                candidate = (tableau[r][-1] / a, basis[r], r)
                if best is None or candidate[:2] < best[:2]:
                    best = candidate
        if best is None:
            # phase I is bounded below by zero; an unbounded ray cannot occur
            raise RuntimeError("Phase-I simplex became unbounded")
        pivot_row = best[2]
        _pivot(tableau, pivot_row, entering)
        basis[pivot_row] = entering


def _reduced_costs(tableau, basis, cost, width) -> List[Fraction]:
    return [cost[j] - sum((cost[b] * tableau[r][j] for r, b in enumerate(basis)), Fraction(0))
            for j in range(width)]


def _pivot(tableau: List[List[Fraction]], row: int, col: int) -> None:
    pivot = tableau[row][col]
    tableau[row] = [v / pivot for v in tableau[row]]
    for r in range(len(tableau)):
        if r != row and tableau[r][col]:
            factor = tableau[r][col]
            tableau[r] = [v - factor * p for v, p in zip(tableau[r], tableau[row])]


def _integer_direction(vector: Sequence[Fraction]) -> List[Fraction]:
    """Positive multiple of a rational vector with coprime integer entries."""
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in vector), 1)
    ints = [int(v * lcm) for v in vector]
    g = reduce(math.gcd, (abs(i) for i in ints), 0) or 1
    return [Fraction(i // g) for i in ints]


def verify_certificate(verdict: HullVerdict) -> bool:
    """Re-check a certificate by exact substitution."""
    points = verdict.points
    d = len(points[0])
    if verdict.contains_zero:
        w = verdict.weights
        if w is None or len(w) != len(points) or any(x < 0 for x in w) or sum(w) != 1:
            return False
        return all(sum(w[i] * points[i][r] for i in range(len(points))) == 0 for r in range(d))
    h = verdict.separator
    if h is None or len(h) != d:
        return False
    return all(sum(h[r] * p[r] for r in range(d)) > 0 for p in points)


def hull_contains_zero(spectrum: Sequence[Sequence]) -> HullVerdict:
    """Decide 0 in conv(spectrum) and attach a verified certificate.

    Raises:
        ValueError: If the spectrum is empty or its points differ in dimension.
    """
    points: List[Point] = [tuple(Fraction(c) for c in p) for p in spectrum]
    if not points:
        raise ValueError("Hull test needs a nonempty spectrum")
    d = len(points[0])
    if any(len(p) != d for p in points):
        raise ValueError("Spectrum points differ in dimension")
    if d == 0:
        weights = [Fraction(1, len(points))] * len(points)
        return HullVerdict(points, True, weights=weights, verified=True)

    tableau, basis = _phase_one(points)
    k = len(points)
    cost = [Fraction(0)] * k + [Fraction(1)] * (d + 1)
    optimum = sum((cost[b] * tableau[r][-1] for r, b in enumerate(basis)), Fraction(0))
    if optimum == 0:
        weights = [Fraction(0)] * k
        for r, b in enumerate(basis):
            if b < k:
                weights[b] = tableau[r][-1]
        verdict = HullVerdict(points, True, weights=weights)
    else:
        reduced = _reduced_costs(tableau, basis, cost, k + d + 1)
        duals = [1 - reduced[k + r] for r in range(d + 1)]
        verdict = HullVerdict(points, False, separator=_integer_direction([-y for y in duals[:d]]))
    verdict.verified = verify_certificate(verdict)
    if not verdict.verified:
        logger.error(f"Hull certificate failed to verify for {len(points)} points in dimension {d}")
    logger.debug(f"Hull test on {k} points: contains_zero={verdict.contains_zero}")
    return verdict


def basis_enumeration_contains_zero(spectrum: Sequence[Sequence]) -> bool:
    """Decide 0 in conv(spectrum) by enumerating every basic solution.

    {w >= 0 : [P^T; 1] w = (0, ..., 0, 1)} is nonempty exactly when one of its
    basic solutions is nonnegative. Points are scaled to integers, so every
    Cramer determinant is an integer and the sign tests are exact.
    Exponential in the point count; meant as a cross-check on small spectra.
    """
    points = [tuple(Fraction(c) for c in p) for p in spectrum]
    k, d = len(points), len(points[0])
    if d == 0:
        return True
    scale = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for p in points for c in p), 1)
    system = np.vstack([np.array([[int(c * scale) for c in p] for p in points], dtype=float).T, np.ones(k)])
    target = np.zeros(d + 1)
    target[-1] = 1
    rank = np.linalg.matrix_rank(system)
    if np.linalg.matrix_rank(np.column_stack([system, target])) > rank:
        return False
    # independent rows, starting from the all-ones row
    rows = [d]
    for i in range(d):
        if len(rows) == rank:
            break
        if np.linalg.matrix_rank(system[rows + [i]]) > len(rows):
            rows.append(i)
    reduced_system, reduced_target = system[rows], target[rows]
    subsets = np.array(list(itertools.combinations(range(k), rank)))
    blocks = np.moveaxis(reduced_system[:, subsets], 0, 1)
    dets = np.rint(np.linalg.det(blocks))
    feasible = dets != 0
    for i in range(rank):
        replaced = blocks.copy()
        replaced[:, :, i] = reduced_target
        feasible &= np.rint(np.linalg.det(replaced)) * dets >= 0
    return bool(np.any(feasible))
