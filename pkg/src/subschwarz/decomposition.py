"""Two-subdomain overlapping decomposition along vertical grid lines.

The domain splits into a left strip ``Omega_1`` (all interior columns
strictly left of the right interface ``Gamma_1``) and a right strip
``Omega_2`` (strictly right of the left interface ``Gamma_2``).  Each
interface is the Dirichlet boundary of the opposite subdomain and an
interior line of its own.  With ``c`` the number of grid cells between the
interfaces, the overlap width is ``2*delta = c*h`` and the overlap holds
``c - 1`` interior columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import ConfigurationError, ValidationError
from .model_problem import GridSpec, VolumeSystem


@dataclass(frozen=True)
class DecompositionSpec:
    """Interface placement: left interface column and overlap width in cells."""

    left_column: int
    overlap_cells: int  # = n_ov + 1 grid cells between the two interfaces

    def __post_init__(self):
        if self.overlap_cells < 2:
            raise ValidationError(
                "overlap must contain at least one interior column (overlap_cells >= 2)"
            )
        if self.left_column < 1:
            raise ValidationError("left interface column must be an interior column")

    @property
    def right_column(self) -> int:
        return self.left_column + self.overlap_cells

    @property
    def n_ov(self) -> int:
        return self.overlap_cells - 1

    def delta(self, grid: GridSpec) -> float:
        """Half the overlap width: 2*delta = overlap_cells * h."""
        return 0.5 * self.overlap_cells * grid.h

    def validate(self, grid: GridSpec) -> None:
        if self.right_column > grid.n_x:
            raise ConfigurationError(
                f"right interface column {self.right_column} is not an interior "
                f"column of a grid with n_x={grid.n_x}"
            )


def centered_decomposition(grid: GridSpec, n_ov: int) -> DecompositionSpec:
    """Place the overlap around the domain mid-column.

    Odd ``n_ov`` gives a symmetric split; even ``n_ov`` is realized by
    shifting the left interface half a cell further out (the overlap width
    ``(n_ov + 1) h`` cannot be centered exactly on a grid line then).
    """
    cells = n_ov + 1
    left = (grid.n_x + 1 - cells) // 2
    spec = DecompositionSpec(left_column=left, overlap_cells=cells)
    spec.validate(grid)
    return spec


class SubdomainSolver:
    """Factorized Dirichlet solver for one strip subdomain.

    Holds the principal submatrix ``A_j`` of the volume matrix (factorized
    once), the Dirichlet lift ``E_j`` (stencil coupling of the subdomain to
    its own interface column) and the trace map onto the opposite
    interface.  ``solve`` returns ``A_j^{-1}(f_j - E_j g)`` for interface
    data ``g``; repeated solves reuse the factorization and are
    deterministic.
    """

    def __init__(self, system: VolumeSystem, spec: DecompositionSpec, side: int):
        if side not in (1, 2):
            raise ValidationError("side must be 1 or 2")
        spec.validate(system.grid)
        grid = system.grid
        ny = grid.n_y
        c_left, c_right = spec.left_column, spec.right_column
        if side == 1:
            self.columns = range(1, c_right)  # interior columns of Omega_1
            self.offset = 0
            self.interface_column = c_right  # own Dirichlet boundary (Gamma_1)
            self.trace_column = c_left  # opposite interface (Gamma_2)
        else:
            self.columns = range(c_left + 1, grid.n_x + 1)
            self.offset = c_left * ny
            self.interface_column = c_left
            self.trace_column = c_right
        self.side = side
        self.n_interface = ny
        self.size = len(self.columns) * ny

        rows = slice(self.offset, self.offset + self.size)
        A = system.matrix
        self.matrix = A[rows, rows].tocsc()
        # Dirichlet lift: volume-matrix coupling block from the subdomain
        # rows to its own interface column.
        self.coupling = A[rows, grid.column_slice(self.interface_column)].tocsr()
        local_trace_start = (self.trace_column - 1) * ny - self.offset
        self._trace = slice(local_trace_start, local_trace_start + ny)
        try:
            self.factorization = spla.splu(self.matrix)
        except RuntimeError as exc:  # singular submatrix
            raise ConfigurationError(f"subdomain {side} factorization failed: {exc}") from exc

    def lift(self, interface_data: np.ndarray) -> np.ndarray:
        """Rhs contribution ``E_j g`` of Dirichlet data on the own interface."""
        return self.coupling @ interface_data

    def solve(self, interface_data=None, body_force=None) -> np.ndarray:
        """Exact subdomain solve ``A_j^{-1}(f_j - E_j g)``.

        2-D right-hand sides are solved column by column against the same
        factorization.
        """
        if interface_data is None and body_force is None:
            raise ValidationError("need interface data, a body force, or both")
        rhs = np.zeros(self.size) if body_force is None else np.asarray(body_force, dtype=float)
        if rhs.shape[0] != self.size:
            raise ValidationError(f"body force has size {rhs.shape[0]}, expected {self.size}")
        if interface_data is not None:
            g = np.asarray(interface_data, dtype=float)
            if g.shape[0] != self.n_interface:
                raise ValidationError(
                    f"interface data has size {g.shape[0]}, expected {self.n_interface}"
                )
            rhs = rhs - self.lift(g)
        return self.factorization.solve(rhs)

    def trace(self, subdomain_values: np.ndarray) -> np.ndarray:
        """Restrict a subdomain vector to the opposite interface column."""
        return subdomain_values[self._trace]

    def body_slice(self) -> slice:
        """Volume-vector slice covered by this subdomain."""
        return slice(self.offset, self.offset + self.size)

    def harmonic_block(self) -> np.ndarray:
        """Dense map interface data -> trace of its harmonic extension.

        Column ``k`` is the trace on the opposite interface of the subdomain
        solve with unit Dirichlet data at the k-th own-interface node and
        zero body force.
        """
        ext = self.factorization.solve(-self.coupling.toarray())
        return ext[self._trace]


def build_decomposition(
    system: VolumeSystem, spec: DecompositionSpec
) -> tuple[SubdomainSolver, SubdomainSolver]:
    """Build and factorize the two subdomain solvers."""
    return SubdomainSolver(system, spec, 1), SubdomainSolver(system, spec, 2)
