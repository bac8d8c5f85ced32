"""Closed-form reference values for rectangle decompositions.

For the Laplacian on a rectangle ``(-L1, L2) x (0, Lt)`` split into two
overlapping strips with interfaces at ``x = -delta`` and ``x = +delta``,
the interface smoother blocks are diagonalized by sine modes and all
contraction factors of the one- and two-level iterations have explicit
expressions.  These are the independent oracles used by the spectral lab
and the acceptance suite; everything here is pure arithmetic, no solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exceptions import ValidationError

RhoFunction = Callable[[int], float]


def rho_rectangle(k: int, length_j: float, delta: float, length_tilde: float = 1.0) -> float:
    """Continuous mode-k smoother eigenvalue of one rectangle subdomain.

    ``sinh(k pi (L_j - delta) / Lt) / sinh(k pi (L_j + delta) / Lt)`` for a
    strip reaching ``L_j`` past the interface pair with half-overlap
    ``delta``.
    """
    if k < 1:
        raise ValidationError("mode index must be >= 1")
    if not 0.0 < delta < length_j:
        raise ValidationError(f"need 0 < delta < L_j, got delta={delta}, L_j={length_j}")
    t = k * math.pi / length_tilde
    # sinh(a)/sinh(b) = exp(a-b) * (1-exp(-2a)) / (1-exp(-2b)); overflow-safe.
    a = t * (length_j - delta)
    b = t * (length_j + delta)
    return math.exp(a - b) * (-math.expm1(-2.0 * a)) / (-math.expm1(-2.0 * b))


def discrete_strip_rho(k: int, n_points: int, cells_to_trace: int, cells_to_data: int) -> float:
    """Exact mode-k eigenvalue of a discrete 5-point strip solve.

    For a strip of ``cells_to_data`` grid cells between its outer Dirichlet
    wall and its data interface, the harmonic extension of the k-th sine
    mode decays along the strip as ``sinh(i * theta_k)`` with
    ``cosh(theta_k) = 2 - cos(k pi h)``, ``h = 1/(n_points + 1)``.  The
    trace at ``cells_to_trace`` cells from the wall is therefore
    ``sinh(theta_k cells_to_trace) / sinh(theta_k cells_to_data)`` times
    the datum.  Independent of any 2-D solve; used as an oracle.
    """
    if not 0 < cells_to_trace < cells_to_data:
        raise ValidationError("need 0 < cells_to_trace < cells_to_data")
    h = 1.0 / (n_points + 1)
    theta = math.acosh(2.0 - math.cos(k * math.pi * h))
    a = theta * cells_to_trace
    b = theta * cells_to_data
    return math.exp(a - b) * (-math.expm1(-2.0 * a)) / (-math.expm1(-2.0 * b))


def discrete_strip_pair(
    k: int, grid_n_y: int, n_x: int, left_column: int, right_column: int
) -> tuple[float, float]:
    """Discrete smoother eigenvalue pair (rho_1, rho_2) for interface columns."""
    rho1 = discrete_strip_rho(k, grid_n_y, left_column, right_column)
    rho2 = discrete_strip_rho(k, grid_n_y, n_x + 1 - right_column, n_x + 1 - left_column)
    return rho1, rho2


def s2s_factor(m: int, n_pre: int, n_post: int, rho_1: RhoFunction, rho_2: RhoFunction) -> float:
    """Two-level contraction factor for an m-mode spectral coarse space.

    Requires the eigenvalue moduli to be non-increasing in the mode index.
    The mixed-parity branch equals the single-cycle operator norm; it
    coincides with the spectral radius whenever ``rho_1 == rho_2``.
    """
    if n_pre < 0 or n_post < 0 or n_pre + n_post < 1:
        raise ValidationError("need n_pre, n_post >= 0 with at least one smoothing step")
    r1 = abs(rho_1(m + 1))
    r2 = abs(rho_2(m + 1))
    s = n_pre + n_post
    if n_pre % 2 == n_post % 2:
        return (r1 * r2) ** (s / 2.0)
    return (r1 * r2) ** ((s - 1) / 2.0) * max(r1, r2)


def generic_two_level_factor(eigenvalues: Sequence[complex], m: int) -> float:
    """Contraction factor |lambda_{m+1}| of a two-level method whose coarse
    space spans the m dominant smoother eigenvectors."""
    mods = np.sort(np.abs(np.asarray(eigenvalues)))[::-1]
    if m < 0 or m >= mods.size:
        raise ValidationError(f"m must be in [0, {mods.size - 1}]")
    return float(mods[m])


# -- mode-pair blocks of the interface two-grid operator ----------------------------


def smoothing_diagonal(k: int, k_hi: int, n: int, rho_1, rho_2) -> np.ndarray:
    """4x4 action of n smoothing steps on the mode pair (k, k_hi).

    Basis order: (mode k on Gamma_2, mode k_hi on Gamma_2,
                  mode k on Gamma_1, mode k_hi on Gamma_1).
    """
    if n == 0:
        return np.eye(4)
    d = np.zeros((4, 4))
    for slot, mode in ((0, k), (1, k_hi)):
        r1, r2 = rho_1(mode), rho_2(mode)
        if n % 2 == 0:
            pi_n = (r1 * r2) ** (n / 2)
            d[slot, slot] = pi_n
            d[slot + 2, slot + 2] = pi_n
        else:
            d[slot, slot + 2] = r1 ** ((n + 1) // 2) * r2 ** ((n - 1) // 2)
            d[slot + 2, slot] = r1 ** ((n - 1) // 2) * r2 ** ((n + 1) // 2)
    return d


@dataclass(frozen=True)
class ModePairBlocks:
    """All matrices describing the two-grid action on one aliasing mode pair."""

    k: int
    k_hi: int
    cos2: float  # cos^2(k pi h / 2)
    sin2: float
    v_mat: np.ndarray  # 4x2 restriction/prolongation footprint
    h_mat: np.ndarray  # 4x4 action of I - G
    d_pre: np.ndarray  # 4x4 pre-smoothing
    d_post: np.ndarray
    lambda_1: np.ndarray  # 2x4
    lambda_2: np.ndarray  # 2x2 coarse-matrix action
    g_block: np.ndarray  # 4x4 full two-grid action


def g2s_blocks(k: int, n_fine: int, rho_1, rho_2, n_pre: int, n_post: int) -> ModePairBlocks:
    """Assemble the 4x4 two-grid block for fine mode k and its alias."""
    n_coarse = (n_fine - 1) // 2
    if not 1 <= k <= n_coarse:
        raise ValidationError(f"mode index must be in [1, {n_coarse}]")
    k_hi = n_fine - k + 1
    h = 1.0 / (n_fine + 1)
    c2 = math.cos(0.5 * k * math.pi * h) ** 2
    s2 = math.sin(0.5 * k * math.pi * h) ** 2
    v = np.array([[c2, 0.0], [-s2, 0.0], [0.0, c2], [0.0, -s2]])
    hm = np.array(
        [
            [1.0, 0.0, -rho_1(k), 0.0],
            [0.0, 1.0, 0.0, -rho_1(k_hi)],
            [-rho_2(k), 0.0, 1.0, 0.0],
            [0.0, -rho_2(k_hi), 0.0, 1.0],
        ]
    )
    d_pre = smoothing_diagonal(k, k_hi, n_pre, rho_1, rho_2)
    d_post = smoothing_diagonal(k, k_hi, n_post, rho_1, rho_2)
    lam1 = v.T @ hm @ d_pre
    lam2 = v.T @ hm @ v
    det = lam2[0, 0] * lam2[1, 1] - lam2[0, 1] * lam2[1, 0]
    if abs(det) < 1e-14:
        raise ValidationError(f"coarse block for mode {k} is numerically singular")
    g_block = d_post @ (d_pre - v @ np.linalg.solve(lam2, lam1))
    return ModePairBlocks(
        k=k, k_hi=k_hi, cos2=c2, sin2=s2, v_mat=v, h_mat=hm,
        d_pre=d_pre, d_post=d_post, lambda_1=lam1, lambda_2=lam2, g_block=g_block,
    )


def middle_mode_block(n_fine: int, rho_1, rho_2, n_pre: int, n_post: int) -> np.ndarray:
    """2x2 two-grid action on the self-aliasing middle mode (N+1)/2.

    Full weighting annihilates this mode, so the coarse correction is
    inactive and only the smoothing steps act.  For an even total number of
    steps the block is the scalar pair (rho_1 rho_2)^{(n1+n2)/2} * I; odd
    totals swap the two interface blocks, so the block is evaluated as a
    matrix power.
    """
    k = (n_fine + 1) // 2
    swap = np.array([[0.0, rho_1(k)], [rho_2(k), 0.0]])
    return np.linalg.matrix_power(swap, n_pre + n_post)


def g2s_spectrum(n_fine: int, rho_1, rho_2, n_pre: int, n_post: int) -> np.ndarray:
    """Eigenvalue multiset of the interface two-grid operator.

    Concatenates the eigenvalues of every 4x4 mode-pair block and of the
    middle-mode block; the result has 2*n_fine entries.
    """
    n_coarse = (n_fine - 1) // 2
    eigs = []
    for k in range(1, n_coarse + 1):
        eigs.append(np.linalg.eigvals(g2s_blocks(k, n_fine, rho_1, rho_2, n_pre, n_post).g_block))
    eigs.append(np.linalg.eigvals(middle_mode_block(n_fine, rho_1, rho_2, n_pre, n_post)))
    return np.concatenate(eigs)


@dataclass(frozen=True)
class G2SFactor:
    value: float
    worst_mode: int
    hypothesis_ok: bool


def g2s_factor(
    n_fine: int, n_pre: int, n_post: int, rho: RhoFunction, rho_other: RhoFunction | None = None
) -> G2SFactor:
    """Closed-form convergence factor of the geometric two-grid interface method.

    Valid under equal subdomain eigenvalues ``rho(k) in [0, 1)`` decreasing
    in k.  When ``rho_other`` differs from ``rho``, the value is still the
    formula evaluated at ``rho`` but ``hypothesis_ok`` is False.
    """
    if n_pre + n_post < 1:
        raise ValidationError("at least one smoothing step is required")
    n_coarse = (n_fine - 1) // 2
    k_mid = (n_fine + 1) // 2
    s = n_pre + n_post
    h = 1.0 / (n_fine + 1)
    hypothesis_ok = True
    values = np.array([rho(k) for k in range(1, n_fine + 1)])
    if np.any(values < 0.0) or np.any(values >= 1.0) or np.any(np.diff(values) > 1e-14):
        hypothesis_ok = False
    if rho_other is not None:
        other = np.array([rho_other(k) for k in range(1, n_fine + 1)])
        if not np.allclose(values, other, rtol=1e-12, atol=1e-14):
            hypothesis_ok = False

    best_val, best_k = -1.0, 0
    for k in list(range(1, n_coarse + 1)) + [k_mid]:
        k_hi = n_fine - k + 1
        c4 = math.cos(0.5 * k * math.pi * h) ** 4
        s4 = math.sin(0.5 * k * math.pi * h) ** 4
        rk, rk_hi = rho(k), rho(k_hi)
        num = c4 * (1.0 - rk) * rk_hi**s + s4 * (1.0 - rk_hi) * rk**s
        den = c4 * (1.0 - rk) + s4 * (1.0 - rk_hi)
        val = num / den
        if val > best_val:
            best_val, best_k = val, k
    return G2SFactor(value=best_val, worst_mode=best_k, hypothesis_ok=hypothesis_ok)


def rho_table(
    k_max: int, length_1: float, length_2: float, delta: float, length_tilde: float = 1.0
) -> np.ndarray:
    """Array of (k, rho_1(k), rho_2(k)) rows for the rectangle geometry."""
    rows = np.empty((k_max, 3))
    for k in range(1, k_max + 1):
        rows[k - 1] = (
            k,
            rho_rectangle(k, length_1, delta, length_tilde),
            rho_rectangle(k, length_2, delta, length_tilde),
        )
    return rows


def rho_from_values(values: Sequence[float]) -> RhoFunction:
    """Wrap a 1-based table of eigenvalues as a mode-index function."""
    arr = np.asarray(values, dtype=float)

    def rho(k: int) -> float:
        return float(arr[k - 1])

    return rho
