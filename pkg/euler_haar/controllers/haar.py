"""
Haar measure in Euler coordinates.

Densities are products of per-level trigonometric factors. Normalization
constants are recomputed exactly from the coordinate domain and reported next
to the published ones. Samplers draw every coordinate independently from
its one-dimensional marginal.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.random import Generator, SeedSequence, default_rng
from scipy.special import roots_legendre

from euler_haar.controllers.euler import forward
from euler_haar.models.angles import (
    CoordinateKind, EulerAngles, GroupKind, coordinate_layout, group_dimension,
)
from euler_haar.models.exact import ExactScalar, beta, gamma_half
from euler_haar.models.reports import LevelConstant, NormalizationReport
from euler_haar.utils.settings import settings

logger = logging.getLogger(__name__)

AngleFunction = Callable[[EulerAngles], np.ndarray]

MAX_QUAD_DIMENSION = 8

# samples per independently seeded stream
SEED_BLOCK = 4096


def density(group: GroupKind, n: int, angles: EulerAngles) -> np.ndarray:
    """Unnormalized Haar density (batched over the angle record)."""
    group = GroupKind.parse(group)
    out = np.ones(angles.batch_shape)
    for coord in coordinate_layout(group, n):
        m, j = coord.level, coord.position
        if group is GroupKind.SU and coord.kind is CoordinateKind.PSI:
            psi = angles.psi[..., coord.index]
            if j < m - 1:
                out = out * np.cos(psi) ** (2 * j - 1) * np.sin(psi)
            else:
                out = out * np.cos(psi) * np.sin(psi) ** (2 * m - 3)
        elif group is GroupKind.SO and coord.trig:
            out = out * np.sin(angles.phi[..., coord.index]) ** (j - 1)
    return out


def _sin_cos_integral(sin_power: int, cos_power: int) -> ExactScalar:
    """Integral of sin^a cos^b over [0, pi/2]."""
    return beta(Fraction(sin_power + 1, 2), Fraction(cos_power + 1, 2)) * Fraction(1, 2)


@lru_cache(maxsize=None)
def level_integral(group: GroupKind, level: int) -> ExactScalar:
    """Exact integral of one level's density factor over that level's coordinates."""
    group = GroupKind.parse(group)
    m = level
    total = ExactScalar.one()
    for coord in coordinate_layout(group, m):
        if coord.level != m:
            continue
        j = coord.position
        if group is GroupKind.SU:
            if coord.kind is CoordinateKind.PSI:
                if j < m - 1:
                    total = total * _sin_cos_integral(1, 2 * j - 1)
                else:
                    total = total * _sin_cos_integral(2 * m - 3, 1)
            elif coord.kind is CoordinateKind.OMEGA:
                total = total * ExactScalar.pi() * Fraction(2, m - 1)
            elif j == 1:
                total = total * ExactScalar.pi()
            else:
                total = total * ExactScalar.pi() * 2
        elif coord.trig:
            # integral of sin^(j-1) over [0, pi]
            total = total * _sin_cos_integral(j - 1, 0) * 2
        else:
            total = total * ExactScalar.pi() * 2
    return total


@lru_cache(maxsize=None)
def published_constant(group: GroupKind, level: int) -> ExactScalar:
    """Published level constant: SU (m-1)!(m-1)/(2 pi^m), SO Gamma(m/2)/(2 pi^(m/2))."""
    group = GroupKind.parse(group)
    m = level
    if group is GroupKind.SU:
        return ExactScalar.rational(Fraction(math.factorial(m - 1) * (m - 1), 2)) * ExactScalar.pi(-m)
    value, half_powers = gamma_half(Fraction(m, 2))
    # pi^(half_powers/2 - m/2); both exponents are halves of integers of equal parity
    return ExactScalar.rational(value / 2) * ExactScalar.pi((half_powers - m) // 2)


def level_constant(group: GroupKind, level: int) -> ExactScalar:
    return level_integral(group, level).inverse()


def normalization(group: GroupKind, n: int) -> NormalizationReport:
    """Recompute the normalization exactly and compare with the published constants.

    Raises:
        GuardError: If ``n`` exceeds the configured rank.
    """
    group = GroupKind.parse(group)
    settings.check_rank(n)
    levels: List[LevelConstant] = []
    computed, published, integral = ExactScalar.one(), ExactScalar.one(), ExactScalar.one()
    for m in range(n, 1, -1):
        c, p = level_constant(group, m), published_constant(group, m)
        levels.append(LevelConstant(m, c, p, c / p))
        computed, published = computed * c, published * p
        integral = integral * level_integral(group, m)
    report = NormalizationReport(group, n, levels, computed, published, computed / published, integral)
    logger.debug(f"Normalization of {group.value.upper()}({n}): {computed.pretty()} "
                 f"(ratio to published {report.ratio.pretty()})")
    return report


def normalization_float(group: GroupKind, n: int) -> float:
    return complex(normalization(group, n).computed).real


def sample(group: GroupKind, n: int, rng: Generator, size: Optional[int] = None) -> EulerAngles:
    """Haar-distributed Euler angles; a batch of ``size`` records when given."""
    group = GroupKind.parse(group)
    batch = () if size is None else (size,)
    angles = EulerAngles.zeros(group, n, batch)
    for coord in coordinate_layout(group, n):
        m, j = coord.level, coord.position
        target = getattr(angles, coord.kind.value)
        if group is GroupKind.SU and coord.kind is CoordinateKind.PSI:
            u = rng.random(batch)
            if j < m - 1:
                value = np.arccos((1 - u) ** (1 / (2 * j)))
            else:
                value = np.arcsin(u ** (1 / (2 * m - 2)))
        elif coord.trig:
            t = rng.beta(j / 2, j / 2, batch)
            value = np.arccos(1 - 2 * t)
        else:
            value = rng.uniform(coord.low, coord.high, batch)
        target[..., coord.index] = value
    return angles


def _block_stats(fn: AngleFunction, group: GroupKind, n: int, count: int,
                 seed: SeedSequence) -> Tuple[int, complex, float]:
    rng = default_rng(seed)
    values = np.asarray(fn(sample(group, n, rng, count)), dtype=complex).reshape(count)
    mean = values.mean()
    return count, complex(mean), float(np.sum(np.abs(values - mean) ** 2))


def _task_stats(fn: AngleFunction, group: GroupKind, n: int,
                blocks: Sequence[Tuple[int, SeedSequence]]) -> List[Tuple[int, complex, float]]:
    return [_block_stats(fn, group, n, count, seed) for count, seed in blocks]


def mc_integrate(fn: AngleFunction, group: GroupKind, n: int, samples: Optional[int] = None,
                 seed: Optional[int] = None, chunk_size: Optional[int] = None,
                 workers: Optional[int] = None) -> Tuple[complex, float]:
    """Monte Carlo Haar average of ``fn`` with its standard error.

    Samples are drawn in blocks of SEED_BLOCK with independent child seeds
    and block statistics are merged in block order. ``chunk_size`` only
    groups blocks into worker tasks, so the result depends on the seed and
    the sample count alone.
    """
    group = GroupKind.parse(group)
    samples = settings.samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    chunk_size = chunk_size or settings.chunk_size
    workers = workers or settings.workers
    if samples < 2:
        raise ValueError(f"Monte Carlo needs at least 2 samples, got {samples}")
    counts = [SEED_BLOCK] * (samples // SEED_BLOCK)
    if samples % SEED_BLOCK:
        counts.append(samples % SEED_BLOCK)
    blocks = list(zip(counts, SeedSequence(seed).spawn(len(counts))))
    per_task = max(1, chunk_size // SEED_BLOCK)
    tasks = [blocks[i:i + per_task] for i in range(0, len(blocks), per_task)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda task: _task_stats(fn, group, n, task), tasks))
    else:
        results = [_task_stats(fn, group, n, task) for task in tasks]
    stats = [s for task in results for s in task]

    total, mean, m2 = 0, 0j, 0.0
    for count, block_mean, block_m2 in stats:
        merged = total + count
        delta = block_mean - mean
        mean = mean + delta * count / merged
        m2 = m2 + block_m2 + abs(delta) ** 2 * total * count / merged
        total = merged
    stderr = math.sqrt(m2 / (total - 1) / total)
    logger.debug(f"MC over {group.value.upper()}({n}): {mean:.6g} +- {stderr:.3g} ({total} samples)")
    return mean, stderr


def _axis_rule(coord, order: int) -> Tuple[np.ndarray, np.ndarray]:
    if coord.periodic:
        nodes = coord.low + coord.width * np.arange(order) / order
        return nodes, np.full(order, coord.width / order)
    x, w = roots_legendre(order)
    return coord.low + (x + 1) * coord.width / 2, w * coord.width / 2


def quad_integrate(fn: AngleFunction, group: GroupKind, n: int,
                   orders: Optional[Sequence[int]] = None, block: int = 65536) -> complex:
    """Tensor-product quadrature of the normalized Haar integral of ``fn``.

    Periodic axes use the trapezoid rule, the others Gauss-Legendre.

    Raises:
        ValueError: If the group dimension exceeds 8 or ``orders`` has the wrong length.
    """
    group = GroupKind.parse(group)
    layout = coordinate_layout(group, n)
    dim = group_dimension(group, n)
    if dim > MAX_QUAD_DIMENSION:
        raise ValueError(f"Quadrature supports dimension <= {MAX_QUAD_DIMENSION}, "
                         f"{group.value.upper()}({n}) has {dim}")
    if orders is None:
        orders = [settings.quad_order] * dim
    if len(orders) != dim:
        raise ValueError(f"Expected {dim} quadrature orders, got {len(orders)}")
    rules = [_axis_rule(coord, order) for coord, order in zip(layout, orders)]
    shape = tuple(orders)
    total_points = int(np.prod(shape))
    total = 0j
    for start in range(0, total_points, block):
        flat_index = np.arange(start, min(start + block, total_points))
        multi = np.unravel_index(flat_index, shape)
        points = np.stack([rules[a][0][multi[a]] for a in range(dim)], axis=-1)
        weights = np.prod([rules[a][1][multi[a]] for a in range(dim)], axis=0)
        angles = EulerAngles.from_flat(group, n, points)
        values = np.asarray(fn(angles), dtype=complex) * density(group, n, angles)
        total += complex(np.sum(weights * values))
    return total * normalization_float(group, n)


def density_from_jacobian(group: GroupKind, n: int, angles: EulerAngles,
                          step: Optional[float] = None) -> float:
    """Invariant volume sqrt(det M) of the parametrization at one point.

    M_ab = -1/2 Re Tr(X_a X_b) with X_a = F^-1 dF/dtheta_a, derivatives by
    Richardson-extrapolated central differences.

    Raises:
        ValueError: At near-singular (boundary) points.
    """
    group = GroupKind.parse(group)
    h = step or settings.jacobian_step
    theta = angles.flat()
    dim = theta.shape[-1]
    offsets = []
    for scale in (h, h / 2):
        for a in range(dim):
            e = np.zeros(dim)
            e[a] = scale
            offsets.extend([theta + e, theta - e])
    points = np.vstack([theta[None, :]] + [p[None, :] for p in offsets])
    mats = forward(EulerAngles.from_flat(group, n, points), check_range=False).matrix
    f0 = mats[0]
    coarse = (mats[1:2 * dim + 1:2] - mats[2:2 * dim + 1:2]) / (2 * h)
    fine = (mats[2 * dim + 1::2] - mats[2 * dim + 2::2]) / h
    derivs = (4 * fine - coarse) / 3
    x = np.conj(f0.T)[None, :, :] @ derivs
    metric = -0.5 * np.einsum('aij,bji->ab', x, x).real
    if np.linalg.cond(metric) > 1e10:
        raise ValueError("Jacobian metric is near-singular; use interior angles")
    sign, logdet = np.linalg.slogdet(metric)
    if sign <= 0:
        raise ValueError("Jacobian metric is not positive definite")
    return float(math.exp(logdet / 2))
