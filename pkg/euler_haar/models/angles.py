"""
Euler angle records and group elements.

The coordinate layout fixes one ordering of all Euler coordinates of a group:
levels N, N-1, ..., 2 and, inside a level, the phi's, then the psi's, then
omega. Monomial keys, quadrature axes and Jacobian columns all use it.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, List, Tuple

import numpy as np

from euler_haar.models.serialization import JsonRecord
from euler_haar.utils.errors import ParseError

logger = logging.getLogger(__name__)


class GroupKind(Enum):
    SU = "su"
    SO = "so"

    @classmethod
    def parse(cls, value: Any) -> 'GroupKind':
        if isinstance(value, GroupKind):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as e:
            raise ParseError(f"Unknown group: {value!r} (expected 'su' or 'so')") from e


class CoordinateKind(Enum):
    PHI = "phi"
    PSI = "psi"
    OMEGA = "omega"


@dataclass(frozen=True)
class Coordinate:
    """One Euler coordinate.

    Attributes:
        kind: phi, psi or omega.
        level: Level m (2..N) the coordinate belongs to.
        position: 1-based position inside the level (m-1 for omega).
        index: Position in the flat array of its kind.
        low: Lower end of the nominal range.
        high: Upper end of the nominal range.
        periodic: Whether the integrand is periodic over the range.
        divisor: Exponent divisor of the abelian substitution (exp variables only).
        trig: True for coordinates that enter through sin/cos powers.
    """

    kind: CoordinateKind
    level: int
    position: int
    index: int
    low: float
    high: float
    periodic: bool
    divisor: int
    trig: bool

    @property
    def name(self) -> str:
        return f"{self.kind.value}{self.index + 1}"

    @property
    def width(self) -> float:
        return self.high - self.low


def phi_offset(n: int, level: int) -> int:
    """Index of the first phi of ``level`` in the flat phi array of rank ``n``."""
    return (n * (n - 1) - level * (level - 1)) // 2


@lru_cache(maxsize=None)
def coordinate_layout(group: GroupKind, n: int) -> Tuple[Coordinate, ...]:
    """All coordinates of the group in canonical order."""
    group = GroupKind.parse(group)
    coords: List[Coordinate] = []
    for m in range(n, 1, -1):
        offset = phi_offset(n, m)
        for j in range(1, m):
            if group is GroupKind.SU:
                if j == 1:
                    coords.append(Coordinate(CoordinateKind.PHI, m, j, offset, 0.0, math.pi, False, 2, False))
                else:
                    coords.append(Coordinate(CoordinateKind.PHI, m, j, offset + j - 1, 0.0, 2 * math.pi,
                                             True, 1, False))
            elif j == 1:
                coords.append(Coordinate(CoordinateKind.PHI, m, j, offset, 0.0, 2 * math.pi, True, 1, False))
            else:
                coords.append(Coordinate(CoordinateKind.PHI, m, j, offset + j - 1, 0.0, math.pi, False, 0, True))
        if group is GroupKind.SU:
            for j in range(1, m):
                coords.append(Coordinate(CoordinateKind.PSI, m, j, offset + j - 1, 0.0, math.pi / 2, False, 0, True))
            coords.append(Coordinate(CoordinateKind.OMEGA, m, m - 1, m - 2, 0.0, 2 * math.pi / (m - 1),
                                     m == 2, m - 1, False))
    return tuple(coords)


def angle_counts(group: GroupKind, n: int) -> Dict[str, int]:
    group = GroupKind.parse(group)
    pairs = n * (n - 1) // 2
    if group is GroupKind.SU:
        return {'phi': pairs, 'psi': pairs, 'omega': n - 1}
    return {'phi': pairs, 'psi': 0, 'omega': 0}


def group_dimension(group: GroupKind, n: int) -> int:
    return sum(angle_counts(group, n).values())


@dataclass
class EulerAngles(JsonRecord):
    """Angle record for one group and rank, optionally batched.

    Each of ``phi``, ``psi`` and ``omega`` has shape ``batch + (count,)``; SO
    records carry empty ``psi`` and ``omega``.
    """

    group: GroupKind
    n: int
    phi: np.ndarray
    psi: np.ndarray = field(default_factory=lambda: np.zeros(0))
    omega: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.group = GroupKind.parse(self.group)
        if self.n < 2:
            raise ValueError(f"Rank must be at least 2, got {self.n}")
        counts = angle_counts(self.group, self.n)
        self.phi = np.asarray(self.phi, dtype=float)
        batch = self.phi.shape[:-1]
        for name, count in counts.items():
            values = np.asarray(getattr(self, name), dtype=float)
            if count == 0 and values.size == 0:
                values = np.zeros(batch + (0,))
            if values.shape[-1:] != (count,):
                raise ValueError(
                    f"{self.group.value.upper()}({self.n}) needs {count} {name} angles, got shape {values.shape}")
            setattr(self, name, values)
        if self.psi.shape[:-1] != batch or self.omega.shape[:-1] != batch:
            raise ValueError("Angle arrays disagree on their batch shape")

    @classmethod
    def zeros(cls, group: GroupKind, n: int, batch: Tuple[int, ...] = ()) -> 'EulerAngles':
        counts = angle_counts(group, n)
        return cls(group, n, *(np.zeros(batch + (counts[k],)) for k in ('phi', 'psi', 'omega')))

    @classmethod
    def from_flat(cls, group: GroupKind, n: int, values: np.ndarray) -> 'EulerAngles':
        """Rebuild a record from an array whose last axis follows the coordinate layout."""
        group = GroupKind.parse(group)
        values = np.asarray(values, dtype=float)
        layout = coordinate_layout(group, n)
        if values.shape[-1] != len(layout):
            raise ValueError(f"Expected {len(layout)} coordinates, got {values.shape[-1]}")
        angles = cls.zeros(group, n, values.shape[:-1])
        for axis, coord in enumerate(layout):
            getattr(angles, coord.kind.value)[..., coord.index] = values[..., axis]
        return angles

    @property
    def batch_shape(self) -> Tuple[int, ...]:
        return self.phi.shape[:-1]

    def flat(self) -> np.ndarray:
        """Coordinates stacked along the last axis in layout order."""
        return np.stack([getattr(self, c.kind.value)[..., c.index]
                         for c in coordinate_layout(self.group, self.n)], axis=-1)

    def take(self, index: int) -> 'EulerAngles':
        """A single record out of a batch."""
        return EulerAngles(self.group, self.n, self.phi[index], self.psi[index], self.omega[index])

    def out_of_range(self, atol: float = 1e-12) -> List[str]:
        """Names of coordinates outside their nominal range anywhere in the batch."""
        names = []
        for coord in coordinate_layout(self.group, self.n):
            values = getattr(self, coord.kind.value)[..., coord.index]
            if np.any(values < coord.low - atol) or np.any(values > coord.high + atol):
                names.append(coord.name)
        return names

    def validate(self) -> bool:
        """Log a warning for out-of-range coordinates; forward maps still accept them."""
        names = self.out_of_range()
        if names:
            logger.warning(f"Angles outside their nominal ranges: {', '.join(names)}")
        return not names

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'group': self.group.value, 'n': self.n, 'phi': self.phi.tolist()}
        if self.group is GroupKind.SU:
            data['psi'] = self.psi.tolist()
            data['omega'] = self.omega.tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EulerAngles':
        try:
            group = GroupKind.parse(data['group'])
            n = int(data['n'])
            arrays = [np.asarray(data['phi'], dtype=float)]
            arrays += [np.asarray(data.get(name, []), dtype=float) for name in ('psi', 'omega')]
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"Invalid angle record: {e}") from e
        return cls(group, n, *arrays)


def parse_angle_list(group: GroupKind, n: int, text: str) -> EulerAngles:
    """Parse a comma-separated angle list in the order phi..., psi..., omega...

    Raises:
        ParseError: If an entry is not a number.
    """
    try:
        values = [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise ParseError(f"Invalid angle list: {text!r}") from e
    counts = angle_counts(group, n)
    if len(values) != sum(counts.values()):
        raise ValueError(f"{GroupKind.parse(group).value.upper()}({n}) needs {sum(counts.values())} angles, "
                         f"got {len(values)}")
    p, s = counts['phi'], counts['psi']
    return EulerAngles(group, n, values[:p], values[p:p + s], values[p + s:])


@dataclass
class GroupElement(JsonRecord):
    """A special unitary or special orthogonal matrix (optionally batched)."""

    group: GroupKind
    matrix: np.ndarray

    def __post_init__(self):
        self.group = GroupKind.parse(self.group)
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim < 2 or self.matrix.shape[-1] != self.matrix.shape[-2]:
            raise ValueError(f"Group elements are square matrices, got shape {self.matrix.shape}")

    @property
    def n(self) -> int:
        return self.matrix.shape[-1]

    def unitarity_error(self) -> float:
        eye = np.eye(self.n)
        product = self.matrix @ np.conj(np.swapaxes(self.matrix, -1, -2))
        return float(np.max(np.abs(product - eye))) if product.size else 0.0

    def det_error(self) -> float:
        return float(np.max(np.abs(np.linalg.det(self.matrix) - 1)))

    def imaginary_error(self) -> float:
        return float(np.max(np.abs(self.matrix.imag)))

    def check(self, tol: float = 1e-10) -> None:
        """Raise ValueError unless the matrix lies in its group within ``tol``."""
        if self.unitarity_error() > tol:
            raise ValueError(f"Matrix is not unitary (error {self.unitarity_error():.3e})")
        if self.det_error() > tol:
            raise ValueError(f"Matrix determinant is not 1 (error {self.det_error():.3e})")
        if self.group is GroupKind.SO and self.imaginary_error() > tol:
            raise ValueError("SO elements must be real")

    def to_dict(self) -> Dict[str, Any]:
        entries = [[float(z.real), float(z.imag)] for z in self.matrix.reshape(-1)]
        return {'group': self.group.value, 'n': self.n, 'entries': entries}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], group: Any = None) -> 'GroupElement':
        try:
            n = int(data['n'])
            entries = np.asarray(data['entries'], dtype=float)
            if entries.shape != (n * n, 2):
                raise ParseError(f"Expected {n * n} [re, im] entries, got shape {entries.shape}")
            matrix = (entries[:, 0] + 1j * entries[:, 1]).reshape(n, n)
            return cls(group or data.get('group', 'su'), matrix)
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"Invalid matrix record: {e}") from e
