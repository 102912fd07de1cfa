"""
Generator basis of su(N) and so(N).

Index j in 1..N^2-1 is decoded as jj = floor(sqrt(j)) and k = j - jj^2 + 1.
k = 2*jj + 1 is the diagonal generator diag(i, ..., i, -i*jj, 0, ...); odd k
puts i at (a, b) and (b, a) with a = (k+1)/2, b = jj+1; even k puts +1 at
(a, b) and -1 at (b, a) with a = k/2. The even-k generators span so(N).
"""
import logging
import math
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def decode_index(n: int, j: int) -> Tuple[int, int]:
    """Return (jj, k) for generator ``j`` of su(n).

    Raises:
        ValueError: If ``j`` is outside 1..n^2-1.
    """
    if n < 2 or not 1 <= j <= n * n - 1:
        raise ValueError(f"Generator index {j} out of range 1..{n * n - 1} for N={n}")
    jj = math.isqrt(j)
    return jj, j - jj * jj + 1


def _plane(jj: int, k: int) -> Tuple[int, int]:
    """0-based (a, b) of an off-diagonal generator."""
    a = (k + 1) // 2 if k % 2 else k // 2
    return a - 1, jj


@lru_cache(maxsize=None)
def _generator_cached(n: int, j: int) -> np.ndarray:
    jj, k = decode_index(n, j)
    out = np.zeros((n, n), dtype=complex)
    if k == 2 * jj + 1:
        out[np.arange(jj), np.arange(jj)] = 1j
        out[jj, jj] = -1j * jj
    else:
        a, b = _plane(jj, k)
        if k % 2:
            out[a, b] = out[b, a] = 1j
        else:
            out[a, b], out[b, a] = 1, -1
    out.setflags(write=False)
    return out


def generator(n: int, j: int) -> np.ndarray:
    """The anti-Hermitian traceless generator lambda_j of su(n)."""
    return _generator_cached(n, j).copy()


def so_indices(n: int) -> List[int]:
    """Indices of the real generators, jj^2 - 1 + 2c for 1 <= c <= jj."""
    return [jj * jj - 1 + 2 * c for jj in range(1, n) for c in range(1, jj + 1)]


def exp_generator(n: int, j: int, t) -> np.ndarray:
    """Closed-form exp(t * lambda_j), vectorised over ``t``.

    Returns an array of shape ``np.shape(t) + (n, n)``.
    """
    jj, k = decode_index(n, j)
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (n, n), dtype=complex)
    idx = np.arange(n)
    out[..., idx, idx] = 1
    if k == 2 * jj + 1:
        phase = np.exp(1j * t)
        for i in range(jj):
            out[..., i, i] = phase
        out[..., jj, jj] = np.exp(-1j * jj * t)
        return out
    a, b = _plane(jj, k)
    c, s = np.cos(t), np.sin(t)
    out[..., a, a] = c
    out[..., b, b] = c
    if k % 2:
        out[..., a, b] = 1j * s
        out[..., b, a] = 1j * s
    else:
        out[..., a, b] = s
        out[..., b, a] = -s
    return out


def trace_pairing(n: int, j: int, k: int) -> float:
    """Tr(lambda_j lambda_k): -2 on off-diagonal generators, -jj(jj+1) on diagonal ones, 0 off the diagonal."""
    return float(np.trace(_generator_cached(n, j) @ _generator_cached(n, k)).real)


def _adjoint(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    return g @ x @ np.linalg.inv(g)


def ad_relation_residual(relation: int, n: int, q: int, phi: float, psi: float = 0.0,
                         p: Optional[int] = None) -> float:
    """Max-norm gap between the two sides of an adjoint-action relation.

    relation 1: Ad(e^{-phi l3}) l_{q^2+1} = cos(phi) l_{q^2+1} - sin(phi) l_{q^2}
    relation 2: the l_{q^2}, l_{q^2+1} components of Ad(e^{-phi l3} e^{-psi l_{q^2+1}}) l3
                are cos(psi) sin(psi) (cos(phi), sin(phi)); the diagonal rest is ignored
    relation 3: Ad(e^{psi l_{p^2+1}} e^{phi l3}) l_{q^2}
    relation 4: Ad(e^{psi l_{p^2+1}} e^{phi l3}) l_{q^2+1}

    Raises:
        ValueError: For an unknown relation or indices outside 1 < q < p <= n-1.
    """
    if relation not in (1, 2, 3, 4):
        raise ValueError(f"Unknown adjoint relation: {relation}")
    if not 2 <= q <= n - 1:
        raise ValueError(f"Relation {relation} needs 2 <= q <= N-1, got q={q}, N={n}")
    c_phi, s_phi = math.cos(phi), math.sin(phi)
    c_psi, s_psi = math.cos(psi), math.sin(psi)
    lam = lambda idx: _generator_cached(n, idx)
    l_q, l_q1 = lam(q * q), lam(q * q + 1)

    if relation == 1:
        lhs = _adjoint(exp_generator(n, 3, -phi), l_q1)
        rhs = c_phi * l_q1 - s_phi * l_q
        return float(np.max(np.abs(lhs - rhs)))

    if relation == 2:
        g = exp_generator(n, 3, -phi) @ exp_generator(n, q * q + 1, -psi)
        image = _adjoint(g, lam(3))
        projections = np.array([
            np.trace(image @ l_q).real / trace_pairing(n, q * q, q * q),
            np.trace(image @ l_q1).real / trace_pairing(n, q * q + 1, q * q + 1),
        ])
        expected = c_psi * s_psi * np.array([c_phi, s_phi])
        return float(np.max(np.abs(projections - expected)))

    if p is None or not q < p <= n - 1:
        raise ValueError(f"Relation {relation} needs N-1 >= p > q > 1, got p={p}, q={q}, N={n}")
    g = exp_generator(n, p * p + 1, psi) @ exp_generator(n, 3, phi)
    l_pq, l_pq1 = lam(p * p + 2 * q), lam(p * p + 2 * q + 1)
    if relation == 3:
        lhs = _adjoint(g, l_q)
        rhs = c_psi * (c_phi * l_q - s_phi * l_q1) - s_psi * (c_phi * l_pq + s_phi * l_pq1)
    else:
        lhs = _adjoint(g, l_q1)
        rhs = c_psi * (s_phi * l_q + c_phi * l_q1) + s_psi * (-s_phi * l_pq + c_phi * l_pq1)
    return float(np.max(np.abs(lhs - rhs)))
