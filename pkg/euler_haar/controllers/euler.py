"""
Generalized Euler parametrizations of SU(N) and SO(N).

Forward maps are batched products of closed-form generator exponentials.
Inverses peel one level at a time from the left using the last column,
then recurse into the top-left block.
"""
import logging
import math
from typing import Tuple

import numpy as np

from euler_haar.controllers.generators import exp_generator
from euler_haar.models.angles import EulerAngles, GroupElement, GroupKind, phi_offset

logger = logging.getLogger(__name__)

# Pivot entries below this are treated as zero by the inverse recursion.
PIVOT_TOL = 1e-13

SHIFT_KINDS = ('left-D2', 'right-DN', 'mid-SU2', 'DN-full', 'DN-1-full')


def _eye(batch: Tuple[int, ...], n: int) -> np.ndarray:
    return np.broadcast_to(np.eye(n, dtype=complex), batch + (n, n)).copy()


def _embed(inner: np.ndarray, n: int) -> np.ndarray:
    out = _eye(inner.shape[:-2], n)
    out[..., :n - 1, :n - 1] = inner
    return out


def _su_matrix(n: int, phi: np.ndarray, psi: np.ndarray, omega: np.ndarray) -> np.ndarray:
    batch = phi.shape[:-1]
    if n == 1:
        return _eye(batch, 1)
    out = _eye(batch, n)
    for k in range(2, n + 1):
        out = out @ exp_generator(n, 3, phi[..., k - 2]) @ exp_generator(n, (k - 1) ** 2 + 1, psi[..., k - 2])
    inner = _su_matrix(n - 1, phi[..., n - 1:], psi[..., n - 1:], omega[..., :n - 2])
    return out @ _embed(inner, n) @ exp_generator(n, n * n - 1, omega[..., n - 2])


def _so_matrix(n: int, phi: np.ndarray) -> np.ndarray:
    batch = phi.shape[:-1]
    if n == 1:
        return np.ones(batch + (1, 1))
    out = np.broadcast_to(np.eye(n), batch + (n, n)).copy()
    for k in range(1, n):
        out = out @ exp_generator(n, (k + 1) ** 2 - 2, phi[..., k - 1]).real
    inner = _so_matrix(n - 1, phi[..., n - 1:])
    block = np.broadcast_to(np.eye(n), batch + (n, n)).copy()
    block[..., :n - 1, :n - 1] = inner
    return out @ block


def su_forward(angles: EulerAngles, check_range: bool = True) -> GroupElement:
    """F_N(phi, psi, omega) for a (possibly batched) SU angle record."""
    if angles.group is not GroupKind.SU:
        raise ValueError(f"su_forward needs SU angles, got {angles.group.value}")
    if check_range:
        angles.validate()
    return GroupElement(GroupKind.SU, _su_matrix(angles.n, angles.phi, angles.psi, angles.omega))


def so_forward(angles: EulerAngles, check_range: bool = True) -> GroupElement:
    """Product of plane rotations e^{phi_k l_{(k+1)^2-2}} times the SO(N-1) block."""
    if angles.group is not GroupKind.SO:
        raise ValueError(f"so_forward needs SO angles, got {angles.group.value}")
    if check_range:
        angles.validate()
    return GroupElement(GroupKind.SO, _so_matrix(angles.n, angles.phi).astype(complex))


def forward(angles: EulerAngles, check_range: bool = True) -> GroupElement:
    if angles.group is GroupKind.SU:
        return su_forward(angles, check_range)
    return so_forward(angles, check_range)


def su_inverse(element: GroupElement, tol: float = 1e-8) -> EulerAngles:
    """Euler angles of a special unitary matrix.

    Degenerate pivots (both entries zero) resolve to angle 0; all angles land
    in their nominal ranges.

    Raises:
        ValueError: If the matrix is not special unitary within ``tol``.
    """
    GroupElement(GroupKind.SU, element.matrix).check(tol)
    n = element.n
    phi, psi, omega = _su_peel(np.array(element.matrix, dtype=complex))
    return EulerAngles(GroupKind.SU, n, phi, psi, omega)


def _su_peel(w: np.ndarray) -> Tuple[list, list, list]:
    n = w.shape[0]
    if n == 1:
        return [], [], []
    phis, psis = [], []
    for k in range(1, n):
        c = w[:, n - 1]
        if k < n - 1:
            psi = math.atan2(abs(c[k]), abs(c[0]))
            degenerate = abs(c[0]) < PIVOT_TOL or abs(c[k]) < PIVOT_TOL
            phi = 0.0 if degenerate else float(np.angle(-c[0] / c[k]))
        else:
            psi = math.atan2(abs(c[0]), abs(c[n - 1]))
            degenerate = abs(c[0]) < PIVOT_TOL or abs(c[n - 1]) < PIVOT_TOL
            phi = 0.0 if degenerate else float(np.angle(c[0] / c[n - 1]))
        phi %= 2 * math.pi
        if k == 1:
            phi /= 2
        phis.append(phi)
        psis.append(psi)
        w = exp_generator(n, k * k + 1, -psi) @ exp_generator(n, 3, -phi) @ w
    top = w[:n - 1, :n - 1]
    omega = (float(np.angle(np.linalg.det(top))) % (2 * math.pi)) / (n - 1)
    inner_phi, inner_psi, inner_omega = _su_peel(np.exp(-1j * omega) * top)
    return phis + inner_phi, psis + inner_psi, inner_omega + [omega]


def so_inverse(element: GroupElement, tol: float = 1e-8) -> EulerAngles:
    """Euler angles of a special orthogonal matrix.

    Raises:
        ValueError: If the matrix is not real special orthogonal within ``tol``.
    """
    GroupElement(GroupKind.SO, element.matrix).check(tol)
    n = element.n
    phi = _so_peel(np.array(element.matrix.real, dtype=float))
    return EulerAngles(GroupKind.SO, n, phi)


def _so_peel(w: np.ndarray) -> list:
    n = w.shape[0]
    if n == 1:
        return []
    phis = []
    for k in range(1, n):
        v = w[:, n - 1]
        if abs(v[k - 1]) < PIVOT_TOL and abs(v[k]) < PIVOT_TOL:
            phi = 0.0
        elif k == 1:
            phi = math.atan2(v[0], v[1]) % (2 * math.pi)
        else:
            phi = math.atan2(abs(v[k - 1]), v[k])
        phis.append(phi)
        w = exp_generator(n, (k + 1) ** 2 - 2, -phi).real @ w
    return phis + _so_peel(w[:n - 1, :n - 1])


def inverse(element: GroupElement) -> EulerAngles:
    if element.group is GroupKind.SU:
        return su_inverse(element)
    return so_inverse(element)


def d_matrix(k: int, n: int, z: float) -> GroupElement:
    """D_{k,n}(z) = diag(e^{iz} (n-1 times), e^{-i(n-1)z}, 1, ..., 1), a k x k matrix.

    Raises:
        ValueError: Unless 2 <= n <= k.
    """
    if not 2 <= n <= k:
        raise ValueError(f"d_matrix needs 2 <= n <= k, got n={n}, k={k}")
    return GroupElement(GroupKind.SU, exp_generator(k, n * n - 1, z))


def _shift_dn_full(phi: np.ndarray, omega: np.ndarray, n: int, level: int, z: float) -> None:
    """Angle shift equivalent to D_{m,m}(z) acting on the left of level m."""
    offset = phi_offset(n, level)
    if level == 2:
        phi[offset] += z
        return
    phi[offset + level - 2] += level * z
    phi[offset + level - 1] -= level * z
    omega[level - 2] += z


def shifted_angles(kind: str, angles: EulerAngles, z: float) -> EulerAngles:
    """The angle record whose forward image equals the transformed matrix.

    Raises:
        ValueError: For an unknown kind or a kind that needs a larger rank.
    """
    if kind not in SHIFT_KINDS:
        raise ValueError(f"Unsupported shift kind: {kind!r} (expected one of {', '.join(SHIFT_KINDS)})")
    if angles.batch_shape:
        raise ValueError("Shift identities take a single angle record")
    n = angles.n
    phi, psi, omega = angles.phi.copy(), angles.psi.copy(), angles.omega.copy()
    if kind == 'left-D2':
        phi[0] += z
    elif kind == 'right-DN':
        omega[n - 2] += z
    elif kind == 'mid-SU2':
        if n == 2:
            omega[0] += z
        else:
            phi[1] += z
    elif kind == 'DN-full':
        _shift_dn_full(phi, omega, n, n, z)
    elif n == 2:
        raise ValueError("DN-1-full needs N >= 3")
    elif n == 3:
        phi[0] += z
    else:
        phi[n - 3] += (n - 1) * z
        phi[n - 2] -= (n - 2) * z
        _shift_dn_full(phi, omega, n, n - 1, z)
        phi[phi_offset(n, n - 1)] -= z
    return EulerAngles(GroupKind.SU, n, phi, psi, omega)


def transformed_matrix(kind: str, angles: EulerAngles, z: float) -> np.ndarray:
    """Left side of a shift identity: F_N(angles) acted on by the D-matrix of ``kind``."""
    n = angles.n
    g = su_forward(angles, check_range=False).matrix
    if kind == 'left-D2':
        return d_matrix(n, 2, z).matrix @ g
    if kind == 'right-DN':
        return g @ d_matrix(n, n, z).matrix
    if kind == 'DN-full':
        return d_matrix(n, n, z).matrix @ g
    if kind == 'DN-1-full':
        if n == 2:
            raise ValueError("DN-1-full needs N >= 3")
        return d_matrix(n, n - 1, z).matrix @ g
    if kind == 'mid-SU2':
        # insert diag(e^{iz}, e^{-iz}, 1, ...) after e^{l3 phi_2} (after A(2) when N = 2)
        prefix = exp_generator(n, 3, angles.phi[0]) @ exp_generator(n, 2, angles.psi[0])
        if n > 2:
            prefix = prefix @ exp_generator(n, 3, angles.phi[1])
        return prefix @ d_matrix(n, 2, z).matrix @ np.linalg.inv(prefix) @ g
    raise ValueError(f"Unsupported shift kind: {kind!r}")


def shift_identity_residual(kind: str, n: int, z: float, angles: EulerAngles) -> float:
    """Max-norm difference between the D-transformed matrix and the shifted parametrization."""
    if angles.group is not GroupKind.SU or angles.n != n:
        raise ValueError(f"Shift identities need SU({n}) angles")
    if angles.batch_shape:
        raise ValueError("Shift identities take a single angle record")
    lhs = transformed_matrix(kind, angles, z)
    rhs = su_forward(shifted_angles(kind, angles, z), check_range=False).matrix
    return float(np.max(np.abs(lhs - rhs)))
