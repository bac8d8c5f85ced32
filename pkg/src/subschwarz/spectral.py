"""Dense, desk-scale assembly of iteration operators and their spectra.

Verification engine for the package: assembles the interface smoother, the
two-level interface operator, the equivalent operators on the augmented
(subdomain-stacked) system, and a classical volumetric two-grid method with
a restricted-additive-Schwarz smoother, then compares spectra against each
other and against the closed forms in :mod:`subschwarz.theory`.

Everything dense lives below hard size caps; above the caps spectral radii
are estimated matrix-free with an Arnoldi eigensolver (power iteration as
fallback).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .coarse import TransferPair, interpolation_matrix, sine_basis
from .core import SubstructuredOperator, dense_smoother, dense_system
from .decomposition import DecompositionSpec, build_decomposition
from .exceptions import ConfigurationError, SizeCapError
from .model_problem import VolumeSystem

DENSE_EIG_CAP = 2048
AUGMENTED_CAP = 20000
IDENTITY_ABORT_TOL = 1e-10


def spectral_radius(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(matrix))))


def estimate_spectral_radius(
    operator, size: int, tol: float = 1e-6, max_iterations: int = 10000, seed: int = 0
) -> float:
    """Dominant eigenvalue modulus of a matrix-free operator.

    Tries a small Arnoldi solve first (robust for the +/- paired and
    complex spectra these iteration operators produce), then falls back to
    power iteration with a two-vector Rayleigh-Ritz extraction.
    """
    linop = spla.aslinearoperator(operator)
    try:
        vals = spla.eigs(
            linop, k=4, which="LM", maxiter=max_iterations, tol=tol, return_eigenvectors=False
        )
        return float(np.max(np.abs(vals)))
    except (spla.ArpackNoConvergence, RuntimeError):
        pass
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(size)
    v /= np.linalg.norm(v)
    radius = 0.0
    for _ in range(max_iterations):
        w = linop.matvec(v)
        w2 = linop.matvec(w)
        # Rayleigh-Ritz on span{v, w} handles +/- eigenvalue pairs.
        basis, _ = np.linalg.qr(np.column_stack([v, w]))
        small = basis.T @ np.column_stack([w, w2])
        new_radius = float(np.max(np.abs(np.linalg.eigvals(small))))
        nrm = np.linalg.norm(w2)
        if nrm == 0.0:
            return 0.0
        v = w2 / nrm
        if abs(new_radius - radius) <= tol * max(new_radius, 1e-30):
            return new_radius
        radius = new_radius
    return radius


@dataclass
class SpectralReport:
    """Spectrum of one iteration operator next to its closed-form value."""

    name: str
    spectrum: np.ndarray  # sorted by modulus, descending
    radius: float
    theory: float | None = None

    @property
    def gap(self) -> float | None:
        if self.theory is None:
            return None
        return abs(self.radius - self.theory) / max(abs(self.theory), 1e-300)


def make_report(name: str, matrix: np.ndarray, theory: float | None = None) -> SpectralReport:
    eigs = np.linalg.eigvals(matrix)
    eigs = eigs[np.argsort(-np.abs(eigs))]
    return SpectralReport(name=name, spectrum=eigs, radius=float(np.abs(eigs[0])), theory=theory)


def pair_spectra(reference: np.ndarray, other: np.ndarray) -> float:
    """Greedy modulus-sorted pairing; returns the largest pairing distance.

    ``other`` may be longer than ``reference``; the surplus eigenvalues
    must then be (numerically) zero and are checked against the same gap.
    """
    ref = np.asarray(reference)[np.argsort(-np.abs(reference))]
    oth = np.asarray(other)[np.argsort(-np.abs(other))]
    if oth.size < ref.size:
        raise ConfigurationError("second spectrum has fewer eigenvalues than the first")
    unmatched = list(range(oth.size))
    worst = 0.0
    for lam in ref:
        dists = np.abs(oth[unmatched] - lam)
        j = int(np.argmin(dists))
        worst = max(worst, float(dists[j]))
        unmatched.pop(j)
    if unmatched:
        worst = max(worst, float(np.max(np.abs(oth[unmatched]))))
    return worst


def two_level_matrix(
    g_dense: np.ndarray,
    transfer: TransferPair,
    n_pre: int = 1,
    n_post: int = 0,
    coarse_matrix: np.ndarray | None = None,
) -> np.ndarray:
    """Dense error operator G^{n_post} (I - P Ac^{-1} R A) G^{n_pre}.

    ``coarse_matrix`` defaults to the projected system R A P; pass the
    rediscretized matrix to study that variant.  An empty coarse space
    (zero columns) degenerates to pure smoothing.
    """
    n = g_dense.shape[0]
    a_dense = np.eye(n) - g_dense
    p, r = transfer.prolongation, transfer.restriction
    if p.shape[1] == 0:
        correction = np.eye(n)
    else:
        coarse = r @ a_dense @ p if coarse_matrix is None else coarse_matrix
        correction = np.eye(n) - p @ np.linalg.solve(coarse, r @ a_dense)
    return (
        np.linalg.matrix_power(g_dense, n_post)
        @ correction
        @ np.linalg.matrix_power(g_dense, n_pre)
    )


def measure_interface_spectrum(op: SubstructuredOperator):
    """Rayleigh quotients of all sine modes through the two smoother blocks.

    Returns ``(rho_1, rho_2, residual)`` where ``rho_j[k-1]`` is the
    measured eigenvalue of block j on mode k and ``residual`` is the worst
    relative deviation of any block image from a multiple of its mode (zero
    up to roundoff exactly when the sine modes diagonalize the blocks).
    """
    if op.n1 != op.n2:
        raise ConfigurationError("mode measurement expects equal interface sizes")
    n = op.n1
    psi = sine_basis(n, normalized=True)
    rho1 = np.empty(n)
    rho2 = np.empty(n)
    residual = 0.0
    for k in range(n):
        mode = psi[:, k]
        out = op.apply_smoother(op.join(mode, mode))
        out_g2, out_g1 = op.split(out)
        rho1[k] = float(mode @ out_g2)  # block 1 maps Gamma_1 data to Gamma_2
        rho2[k] = float(mode @ out_g1)
        residual = max(
            residual,
            float(np.linalg.norm(out_g2 - rho1[k] * mode)),
            float(np.linalg.norm(out_g1 - rho2[k] * mode)),
        )
    return rho1, rho2, residual


# -- augmented (subdomain-stacked) formulation ------------------------------------


@dataclass
class AugmentedSet:
    """Dense interface, augmented and two-level operators with their glue.

    ``trace_map`` (the stacked interface traces), ``solve_block`` (the
    block-diagonal subdomain inverses) and ``extension_block`` satisfy the
    coupling identities checked in ``verify_identities``; the two-level
    operators are built from one pre-smoothing step.
    """

    system: VolumeSystem
    decomposition: DecompositionSpec
    g_interface: np.ndarray  # smoother on the interface unknowns
    a_interface: np.ndarray
    a_augmented: np.ndarray
    solve_block: np.ndarray  # blockdiag(A_1^{-1}, A_2^{-1})
    trace_map: np.ndarray  # interface traces of stacked subdomain vectors
    extension_block: np.ndarray  # off-diagonal lift block of the splitting
    g_augmented: np.ndarray
    p_interface: np.ndarray
    r_interface: np.ndarray
    p_augmented: np.ndarray
    r_augmented: np.ndarray
    g2l_interface: np.ndarray
    g2l_augmented: np.ndarray

    def verify_identities(self, tol: float = IDENTITY_ABORT_TOL) -> dict[str, float]:
        """Residuals of the four coupling identities; aborts above ``tol``."""
        tt = self.trace_map
        checks = {
            "trace_orthonormal": np.abs(tt @ tt.T - np.eye(tt.shape[0])).max(),
            "system_intertwine": np.abs(
                self.a_interface @ tt - tt @ self.solve_block @ self.a_augmented
            ).max(),
            "smoother_product": np.abs(
                self.g_augmented - self.solve_block @ self.extension_block @ tt
            ).max(),
            "smoother_intertwine": np.abs(
                self.g_interface @ tt - tt @ self.g_augmented
            ).max(),
        }
        bad = {k: v for k, v in checks.items() if v > tol}
        if bad:
            raise ConfigurationError(f"augmented coupling identities violated: {bad}")
        return checks


def assemble_augmented(
    system: VolumeSystem,
    spec: DecompositionSpec,
    transfer: TransferPair,
    cap: int | None = None,
) -> AugmentedSet:
    """Assemble the augmented system and the spectrally equivalent two-level pair."""
    cap = AUGMENTED_CAP if cap is None else cap
    sub1, sub2 = build_decomposition(system, spec)
    n_aug = sub1.size + sub2.size
    if n_aug > cap:
        raise SizeCapError(f"augmented system of size {n_aug} exceeds cap {cap}")
    ny = sub1.n_interface
    n_s = 2 * ny

    op = SubstructuredOperator(sub1, sub2)
    g_s = dense_smoother(op)
    a_s = np.eye(n_s) - g_s

    # Traces of stacked subdomain vectors: Gamma_2 values from subdomain 1,
    # Gamma_1 values from subdomain 2.
    trace_map = np.zeros((n_s, n_aug))
    t1 = (sub1.trace_column - 1) * ny
    trace_map[:ny, t1 : t1 + ny] = np.eye(ny)
    t2 = sub1.size + (sub2.trace_column - 1) * ny - sub2.offset
    trace_map[ny:, t2 : t2 + ny] = np.eye(ny)

    e1 = sub1.coupling.toarray()
    e2 = sub2.coupling.toarray()
    a_aug = np.zeros((n_aug, n_aug))
    a_aug[: sub1.size, : sub1.size] = sub1.matrix.toarray()
    a_aug[sub1.size :, sub1.size :] = sub2.matrix.toarray()
    a_aug[: sub1.size, sub1.size :] = e1 @ trace_map[ny:, sub1.size :]
    a_aug[sub1.size :, : sub1.size] = e2 @ trace_map[:ny, : sub1.size]

    solve_block = np.zeros((n_aug, n_aug))
    solve_block[: sub1.size, : sub1.size] = sub1.factorization.solve(np.eye(sub1.size))
    solve_block[sub1.size :, sub1.size :] = sub2.factorization.solve(np.eye(sub2.size))

    # Off-diagonal lift block of the block-Jacobi splitting: the stacked
    # system minus its diagonal equals -(extension_block @ trace_map).
    extension_block = np.zeros((n_aug, n_s))
    extension_block[: sub1.size, ny:] = -e1
    extension_block[sub1.size :, :ny] = -e2

    g_aug = solve_block @ extension_block @ trace_map

    p_s, r_s = transfer.prolongation, transfer.restriction
    p_a = trace_map.T @ p_s
    r_a = r_s @ trace_map

    g2l_s = two_level_matrix(g_s, transfer, n_pre=1, n_post=0)
    da = solve_block @ a_aug
    coarse_a = r_a @ da @ p_a
    g2l_a = (np.eye(n_aug) - p_a @ np.linalg.solve(coarse_a, r_a @ da)) @ g_aug

    out = AugmentedSet(
        system=system,
        decomposition=spec,
        g_interface=g_s,
        a_interface=a_s,
        a_augmented=a_aug,
        solve_block=solve_block,
        trace_map=trace_map,
        extension_block=extension_block,
        g_augmented=g_aug,
        p_interface=p_s,
        r_interface=r_s,
        p_augmented=p_a,
        r_augmented=r_a,
        g2l_interface=g2l_s,
        g2l_augmented=g2l_a,
    )
    out.verify_identities()
    return out


# -- volumetric two-grid method with a RAS smoother --------------------------------


def _volume_interpolation(grid) -> sp.csr_matrix:
    """2-D linear interpolation from the once-coarsened volume grid."""
    px = sp.csr_matrix(interpolation_matrix(grid.n_x))
    py = sp.csr_matrix(interpolation_matrix(grid.n_y))
    return sp.kron(px, py, format="csr")  # x-major node ordering


@dataclass
class RasTwoGrid:
    """Two-grid volumetric iteration with a restricted additive Schwarz smoother."""

    system: VolumeSystem
    decomposition: DecompositionSpec
    smoother: spla.LinearOperator
    two_level: spla.LinearOperator
    size: int

    def dense_two_level(self, cap: int = DENSE_EIG_CAP) -> np.ndarray:
        if self.size > cap:
            raise SizeCapError(f"dense RAS operator of size {self.size} exceeds cap {cap}")
        return self.two_level @ np.eye(self.size)

    def radius(self, cap: int = DENSE_EIG_CAP) -> float:
        if self.size <= cap:
            return spectral_radius(self.dense_two_level(cap))
        return estimate_spectral_radius(self.two_level, self.size)


def assemble_two_level_ras(system: VolumeSystem, spec: DecompositionSpec) -> RasTwoGrid:
    """Build the RAS smoother and its coarse-grid-corrected iteration.

    The partition of unity assigns every overlap column left of the overlap
    mid-column to subdomain 1 and the rest to subdomain 2; the coarse level
    is the once-coarsened volume grid with 2-D full weighting.
    """
    grid = system.grid
    sub1, sub2 = build_decomposition(system, spec)
    ny = grid.n_y
    mid = (spec.left_column + spec.right_column) // 2
    own1 = mid * ny  # subdomain-1 nodes up to and including the mid column
    own2_start = mid * ny - sub2.offset

    a_v = system.matrix
    n = grid.n_volume

    def ras_matvec(v):
        v = np.asarray(v).ravel()
        u1 = sub1.factorization.solve(v[sub1.body_slice()])
        u2 = sub2.factorization.solve(v[sub2.body_slice()])
        out = np.zeros(n)
        out[:own1] = u1[:own1]
        out[mid * ny :] = u2[own2_start:]
        return out

    prolong = _volume_interpolation(grid)
    restrict = (0.25 * prolong.T).tocsr()
    coarse = (restrict @ (a_v @ prolong)).tocsc()
    coarse_lu = spla.splu(coarse)

    def smoother_matvec(v):
        v = np.asarray(v).ravel()
        return v - ras_matvec(a_v @ v)

    def two_level_matvec(v):
        w = smoother_matvec(v)
        res = a_v @ w
        return w - prolong @ coarse_lu.solve(restrict @ res)

    smoother = spla.LinearOperator((n, n), matvec=smoother_matvec)
    two_level = spla.LinearOperator((n, n), matvec=two_level_matvec)
    return RasTwoGrid(
        system=system, decomposition=spec, smoother=smoother, two_level=two_level, size=n
    )


# -- coarse-space rank diagnostics ---------------------------------------------------


@dataclass
class RankReport:
    matrix: np.ndarray
    singular_values: np.ndarray
    rank: int

    @property
    def full_rank(self) -> bool:
        return self.rank == min(self.matrix.shape)


def check_coarse_rank(
    a_dense: np.ndarray, prolongation: np.ndarray, restriction: np.ndarray | None = None
) -> RankReport:
    """Numerical rank of the projected matrix R A P (threshold 1e-10)."""
    r = prolongation.T if restriction is None else restriction
    projected = r @ a_dense @ prolongation
    sigma = np.linalg.svd(projected, compute_uv=False) if projected.size else np.zeros(0)
    rank = int(np.sum(sigma > 1e-10))
    return RankReport(matrix=projected, singular_values=sigma, rank=rank)
