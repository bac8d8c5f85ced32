"""Transfer operators, coarse spaces and coarse operators.

Two families of prolongation/restriction pairs between the fine interface
space and a coarse space:

* geometric: per-interface linear interpolation (hat columns [1/2, 1, 1/2])
  with full-weighting restriction ``R = P^T / 2``;
* spectral: the columns of an orthonormal basis matrix (sine modes, measured
  smoother eigenvectors, or a randomized sketch) with ``R = P^T``.

The coarse operator is either the projection ``R (I - G) P`` of the fine
interface system (one smoother application per basis column, reusing the
product ``G P`` that the economical solvers need anyway) or the direct
rediscretization of the interface system on the coarsened grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg

from .core import SubstructuredOperator, dense_smoother
from .exceptions import (
    CoarseOperatorRankError,
    DegenerateCoarseSpaceError,
    ValidationError,
)


@dataclass(frozen=True)
class TransferPair:
    """Prolongation (fine x coarse) and restriction (coarse x fine) pair."""

    prolongation: np.ndarray
    restriction: np.ndarray
    kind: str  # "geometric" | "spectral"

    def __post_init__(self):
        p, r = self.prolongation, self.restriction
        if p.shape != r.T.shape:
            raise ValidationError(f"transfer shapes are inconsistent: P {p.shape}, R {r.shape}")

    @property
    def n_fine(self) -> int:
        return self.prolongation.shape[0]

    @property
    def n_coarse(self) -> int:
        return self.prolongation.shape[1]

    def conjugated(self, u: np.ndarray) -> "TransferPair":
        """Equivalent pair (P U, U^-1 R); with orthogonal U this is (P U, U^T R)."""
        return TransferPair(
            prolongation=self.prolongation @ u,
            restriction=np.linalg.solve(u, self.restriction),
            kind="spectral",
        )


def interpolation_matrix(n_fine: int) -> np.ndarray:
    """1-D linear interpolation from the coarsened line (hat stencils).

    Column k carries the values (1/2, 1, 1/2) at the fine nodes around the
    fine image of coarse node k; requires a dyadic line, n_fine = 2^l - 1.
    """
    if n_fine < 3 or (n_fine + 1) & n_fine != 0:
        raise ValidationError(f"interpolation needs n_fine = 2^l - 1 >= 3, got {n_fine}")
    n_coarse = (n_fine - 1) // 2
    p = np.zeros((n_fine, n_coarse))
    for k in range(n_coarse):
        p[2 * k, k] = 0.5
        p[2 * k + 1, k] = 1.0
        p[2 * k + 2, k] = 0.5
    return p


def build_geometric_transfer(n_per_interface: int) -> TransferPair:
    """Blocked interpolation / full-weighting pair on both interfaces."""
    p_tilde = interpolation_matrix(n_per_interface)
    p = scipy.linalg.block_diag(p_tilde, p_tilde)
    return TransferPair(prolongation=p, restriction=0.5 * p.T, kind="geometric")


def sine_basis(n_points: int, modes: Iterable[int] | None = None, normalized=True) -> np.ndarray:
    """Columns sin(k pi j / (n+1)), j = 1..n, for the requested modes.

    The raw squared norm of each column is (n+1)/2; with ``normalized`` the
    columns are unit vectors.
    """
    ks = np.arange(1, n_points + 1) if modes is None else np.asarray(list(modes))
    j = np.arange(1, n_points + 1)
    basis = np.sin(np.pi * np.outer(j, ks) / (n_points + 1))
    if normalized:
        basis *= np.sqrt(2.0 / (n_points + 1))
    return basis


@dataclass(frozen=True)
class CoarseSpace:
    """Orthonormal interface basis spanning the coarse space.

    ``basis`` has one column per coarse degree of freedom; for per-interface
    constructions the first half of the columns is supported on the Gamma_2
    block and the second half on the Gamma_1 block.
    """

    basis: np.ndarray
    provenance: str  # fourier_sine | discrete_eigen | pca_random | file
    seed: int | None = None
    sketch_width: int | None = None
    smoothing_power: int | None = None
    singular_values: np.ndarray | None = None

    def __post_init__(self):
        gram = self.basis.T @ self.basis
        if not np.allclose(gram, np.eye(self.basis.shape[1]), atol=1e-12):
            raise ValidationError("coarse-space basis columns are not orthonormal")

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def transfer(self) -> TransferPair:
        return TransferPair(prolongation=self.basis, restriction=self.basis.T, kind="spectral")


def build_fourier_space(m: int, n_per_interface: int) -> CoarseSpace:
    """First m sine modes per interface block (2m columns in total)."""
    if not 1 <= m <= n_per_interface:
        raise ValidationError(f"m must be in [1, {n_per_interface}], got {m}")
    psi = sine_basis(n_per_interface, range(1, m + 1))
    basis = scipy.linalg.block_diag(psi, psi)
    return CoarseSpace(basis=basis, provenance="fourier_sine")


def build_eigen_space(dense_g: np.ndarray, n2: int, m: int) -> CoarseSpace:
    """Per-interface dominant eigenvectors of the smoother round trips.

    Uses the eigenvectors of ``G_1 G_2`` (a Gamma_2 -> Gamma_2 map) and of
    ``G_2 G_1`` for the Gamma_1 block, each sorted by eigenvalue modulus and
    orthonormalized.
    """
    b1 = dense_g[:n2, n2:]  # Gamma_1 data -> Gamma_2 values
    b2 = dense_g[n2:, :n2]
    blocks = []
    for prod in (b1 @ b2, b2 @ b1):
        if m > prod.shape[0]:
            raise ValidationError(f"m={m} exceeds interface dimension {prod.shape[0]}")
        lam, vec = np.linalg.eig(prod)
        order = np.argsort(-np.abs(lam))[:m]
        chosen = vec[:, order]
        if np.max(np.abs(chosen.imag)) > 1e-8 * max(1.0, np.max(np.abs(chosen.real))):
            raise ValidationError("dominant smoother eigenvectors are not real")
        q, _ = np.linalg.qr(chosen.real)
        blocks.append(q)
    return CoarseSpace(basis=scipy.linalg.block_diag(*blocks), provenance="discrete_eigen")


def build_pca_space(
    op: SubstructuredOperator,
    m: int,
    q: int | None = None,
    r: int = 3,
    seed: int = 0,
    keep: int | None = None,
) -> CoarseSpace:
    """Randomized coarse space from a smoothed Gaussian sketch.

    Draws q standard-normal interface vectors, applies the smoother r times
    to each, and keeps the ``keep`` leading left singular vectors of the
    smoothed sketch (defaults: q = keep = 2m).  The smoothed columns are
    independent and could be produced concurrently.
    """
    if r < 1:
        raise ValidationError("at least one smoothing application is required (r >= 1)")
    if m < 1:
        raise ValidationError("m must be >= 1")
    q = 2 * m if q is None else q
    keep = 2 * m if keep is None else keep
    if keep > q:
        raise ValidationError(f"cannot keep {keep} directions from a sketch of width {q}")
    if q > op.n:
        raise ValidationError(f"sketch width {q} exceeds interface dimension {op.n}")
    rng = np.random.default_rng(seed)
    sketch = rng.standard_normal((op.n, q))
    for _ in range(r):
        sketch = op.apply_smoother_to_columns(sketch)
    u, sigma, _ = np.linalg.svd(sketch, full_matrices=False)
    if sigma[keep - 1] <= 1e-12 * sigma[0]:
        raise DegenerateCoarseSpaceError(
            f"smoothed sketch has numerical rank < {keep}; reduce the requested "
            f"coarse dimension or enlarge the sketch"
        )
    return CoarseSpace(
        basis=u[:, :keep],
        provenance="pca_random",
        seed=seed,
        sketch_width=q,
        smoothing_power=r,
        singular_values=sigma,
    )


def save_coarse_space(path, space: CoarseSpace) -> None:
    """Write the basis as a text matrix (rows = fine index, cols = basis index)."""
    header = (
        f"provenance={space.provenance} seed={space.seed} "
        f"q={space.sketch_width} r={space.smoothing_power}"
    )
    if space.singular_values is not None:
        # keep the sketch singular values visible so rank ties are auditable
        header += "\nsigma=" + ",".join(format(s, ".8e") for s in space.singular_values)
    np.savetxt(path, space.basis, fmt="%.17e", header=header)


def load_coarse_space(path) -> CoarseSpace:
    basis = np.atleast_2d(np.loadtxt(path))
    return CoarseSpace(basis=basis, provenance="file")


class CoarseOperator:
    """Factorized dense coarse matrix with a build-time rank check."""

    def __init__(self, matrix: np.ndarray, kind: str):
        self.matrix = np.asarray(matrix, dtype=float)
        self.kind = kind
        sigma = np.linalg.svd(self.matrix, compute_uv=False)
        tol = max(self.matrix.shape) * np.finfo(float).eps * (sigma[0] if sigma.size else 0.0)
        if sigma.size == 0 or sigma[-1] <= max(tol, 1e-13 * sigma[0]):
            raise CoarseOperatorRankError(
                "coarse matrix is rank deficient: the projection of the system "
                "action onto the coarse space vanishes for some coarse vector"
            )
        self._lu = scipy.linalg.lu_factor(self.matrix)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return scipy.linalg.lu_solve(self._lu, rhs)


def galerkin_coarse_matrix(
    op: SubstructuredOperator, transfer: TransferPair
) -> tuple[np.ndarray, np.ndarray]:
    """Projected coarse matrix R (I - G) P and the reusable product G P."""
    smoothed_p = op.apply_smoother_to_columns(transfer.prolongation)
    coarse = transfer.restriction @ (transfer.prolongation - smoothed_p)
    return coarse, smoothed_p


def rediscretized_coarse_matrix(coarse_op: SubstructuredOperator) -> np.ndarray:
    """Dense interface system I - G assembled on the coarsened grid."""
    return np.eye(coarse_op.n) - dense_smoother(coarse_op)


def build_coarse_operator(
    op: SubstructuredOperator,
    transfer: TransferPair,
    kind: str = "galerkin",
    coarse_op: SubstructuredOperator | None = None,
) -> tuple[CoarseOperator, np.ndarray]:
    """Coarse operator plus the smoothed prolongation G P.

    ``kind="rediscretized"`` needs the interface operator of the coarsened
    problem; the smoothed prolongation is computed for both kinds since the
    economical solver variants apply it every cycle.
    """
    if kind == "galerkin":
        matrix, smoothed_p = galerkin_coarse_matrix(op, transfer)
    elif kind == "rediscretized":
        if coarse_op is None:
            raise ValidationError("rediscretized coarse operator needs the coarse-grid operator")
        if coarse_op.n != transfer.n_coarse:
            raise ValidationError(
                f"coarse-grid operator size {coarse_op.n} does not match the "
                f"transfer's coarse dimension {transfer.n_coarse}"
            )
        matrix = rediscretized_coarse_matrix(coarse_op)
        smoothed_p = op.apply_smoother_to_columns(transfer.prolongation)
    else:
        raise ValidationError(f"unknown coarse operator kind {kind!r}")
    return CoarseOperator(matrix, kind), smoothed_p
