"""Rectangular elliptic model problems on uniform grids.

The domain is the rectangle ``(x0, x0 + width) x (0, height)`` with
homogeneous Dirichlet boundary conditions.  Supported operators:

* ``laplace``:              -lap(u) = f
* ``diffusion_variable``:   -div(alpha grad u) = f, alpha piecewise constant
                            (background value plus axis-aligned channel boxes)
* ``advection_diffusion``:  -div(alpha grad u) + a . grad u = f

Discretization is the standard second-order 5-point finite-difference
scheme; variable coefficients enter through harmonic-mean face values and
advection through first-order upwinding.  Interior nodes are ordered
x-major (all points of one vertical grid line are contiguous), which keeps
every vertical interface a contiguous slice of the volume vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import ConfigurationError, ValidationError

Field2D = Callable[[np.ndarray, np.ndarray], np.ndarray]

OPERATOR_KINDS = ("laplace", "diffusion_variable", "advection_diffusion")

#: Named right-hand sides selectable from config files and the CLI.
RHS_CATALOG: dict[str, Field2D] = {
    "zero": lambda x, y: np.zeros_like(x),
    "one": lambda x, y: np.ones_like(x),
    "sine2pi": lambda x, y: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y),
    "mixed_sine": lambda x, y: np.sin(2 * np.pi * x)
    * np.sin(2 * np.pi * y)
    * np.sin(2 * np.pi * x * y),
}

#: Named advection fields ``(x, y) -> (a_x, a_y)``.
ADVECTION_CATALOG: dict[str, Callable] = {
    "swirl": lambda x, y: (10.0 * x**3, -20.0 - 30.0 * y**2),
}


@dataclass(frozen=True)
class ChannelBox:
    """Axis-aligned box on which the diffusion coefficient takes ``value``."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    value: float

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValidationError(f"channel box has empty extent: {self}")
        if self.value <= 0.0:
            raise ValidationError(f"channel diffusion value must be positive, got {self.value}")


@dataclass(frozen=True)
class ProblemSpec:
    """Continuous problem definition (domain, operator, coefficients, rhs)."""

    width: float = 2.0
    height: float = 1.0
    operator_kind: str = "laplace"
    diffusion_background: float = 1.0
    channels: tuple[ChannelBox, ...] = ()
    advection: str | Callable | None = None
    rhs: str | Field2D = "zero"
    x_min: float | None = None  # default: domain centered at x = 0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError("domain width and height must be positive")
        if self.operator_kind not in OPERATOR_KINDS:
            raise ValidationError(
                f"unknown operator_kind {self.operator_kind!r}, expected one of {OPERATOR_KINDS}"
            )
        if self.diffusion_background <= 0.0:
            raise ValidationError("diffusion coefficient must be positive")
        if self.operator_kind == "laplace":
            if self.channels or self.diffusion_background != 1.0 or self.advection is not None:
                raise ValidationError(
                    "laplace means alpha == 1 and no advection; use "
                    "diffusion_variable or advection_diffusion instead"
                )
        if self.operator_kind != "advection_diffusion" and self.advection is not None:
            raise ValidationError("advection field given but operator is not advection_diffusion")
        x0, x1 = self.x0, self.x0 + self.width
        for box in self.channels:
            inside = (
                box.x_lo >= x0 - 1e-12
                and box.x_hi <= x1 + 1e-12
                and box.y_lo >= -1e-12
                and box.y_hi <= self.height + 1e-12
            )
            if not inside:
                raise ValidationError(f"channel box {box} does not lie inside the domain")
        if isinstance(self.rhs, str) and self.rhs not in RHS_CATALOG:
            raise ValidationError(f"unknown rhs selector {self.rhs!r}")
        if isinstance(self.advection, str) and self.advection not in ADVECTION_CATALOG:
            raise ValidationError(f"unknown advection selector {self.advection!r}")

    @property
    def x0(self) -> float:
        return -0.5 * self.width if self.x_min is None else self.x_min

    def rhs_function(self) -> Field2D:
        return RHS_CATALOG[self.rhs] if isinstance(self.rhs, str) else self.rhs

    def advection_function(self) -> Callable | None:
        if self.advection is None:
            return None
        if isinstance(self.advection, str):
            return ADVECTION_CATALOG[self.advection]
        return self.advection

    def diffusion(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Sample alpha(x, y); later channel boxes override earlier ones."""
        alpha = np.full(np.broadcast(x, y).shape, float(self.diffusion_background))
        for box in self.channels:
            mask = (x >= box.x_lo) & (x <= box.x_hi) & (y >= box.y_lo) & (y <= box.y_hi)
            alpha[mask] = box.value
        return alpha


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid with 2^level - 1 interior points per vertical line.

    The spacing is the same in both directions, so the domain width must be
    an integer multiple of ``h = height / 2^level``.
    """

    level: int
    width: float = 2.0
    height: float = 1.0
    x_min: float | None = None

    def __post_init__(self):
        if self.level < 2:
            raise ValidationError(f"grid level must be >= 2, got {self.level}")
        nx = self.width / self.h - 1.0
        if abs(nx - round(nx)) > 1e-12 * max(1.0, abs(nx)):
            raise ConfigurationError(
                f"width {self.width} is not a multiple of the grid spacing h={self.h}"
            )

    @property
    def n_y(self) -> int:
        return 2**self.level - 1

    @property
    def h(self) -> float:
        return self.height / (self.n_y + 1)

    @property
    def n_x(self) -> int:
        return round(self.width / self.h) - 1

    @property
    def n_volume(self) -> int:
        return self.n_x * self.n_y

    @property
    def x0(self) -> float:
        return -0.5 * self.width if self.x_min is None else self.x_min

    def x_of_column(self, i: int) -> float:
        """Physical x of grid column ``i`` (column 0 is the left boundary)."""
        return self.x0 + i * self.h

    def interior_coords(self) -> tuple[np.ndarray, np.ndarray]:
        xs = self.x0 + self.h * np.arange(1, self.n_x + 1)
        ys = self.h * np.arange(1, self.n_y + 1)
        return xs, ys

    def node_index(self, column: int, row: int) -> int:
        """Flat index of interior node (column, row), both 1-based."""
        return (column - 1) * self.n_y + (row - 1)

    def column_slice(self, column: int) -> slice:
        """Volume-vector slice holding grid column ``column`` (1-based)."""
        return slice((column - 1) * self.n_y, column * self.n_y)


def make_grid(problem: ProblemSpec, level: int) -> GridSpec:
    """Grid matching the problem's domain at refinement ``level``."""
    return GridSpec(level=level, width=problem.width, height=problem.height, x_min=problem.x_min)


@dataclass(frozen=True)
class VolumeSystem:
    """Assembled sparse system ``matrix @ u = rhs`` on the interior nodes."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    grid: GridSpec
    problem: ProblemSpec


def _check_consistency(problem: ProblemSpec, grid: GridSpec) -> None:
    same = (
        abs(problem.width - grid.width) <= 1e-12 * problem.width
        and abs(problem.height - grid.height) <= 1e-12 * problem.height
        and abs(problem.x0 - grid.x0) <= 1e-12 * max(1.0, abs(problem.x0))
    )
    if not same:
        raise ConfigurationError("grid dimensions do not match the problem domain")


def assemble_volume(problem: ProblemSpec, grid: GridSpec) -> VolumeSystem:
    """Assemble the 5-point (plus upwind) discretization and the rhs vector.

    Face diffusion coefficients are harmonic means of the nodal values,
    which keeps the matrix symmetric positive definite also for strongly
    jumping coefficients.
    """
    _check_consistency(problem, grid)
    nx, ny, h = grid.n_x, grid.n_y, grid.h

    # Nodal alpha on the full grid including the boundary ring.
    xn = problem.x0 + h * np.arange(0, nx + 2)
    yn = h * np.arange(0, ny + 2)
    Xn, Yn = np.meshgrid(xn, yn, indexing="ij")
    alpha = problem.diffusion(Xn, Yn)
    if np.any(alpha <= 0.0):
        raise ValidationError("diffusion coefficient must be positive everywhere")

    def hmean(a, b):
        return 2.0 * a * b / (a + b)

    ai = alpha[1:-1, 1:-1]  # interior nodes, shape (nx, ny)
    a_w = hmean(alpha[:-2, 1:-1], ai)
    a_e = hmean(alpha[2:, 1:-1], ai)
    a_s = hmean(alpha[1:-1, :-2], ai)
    a_n = hmean(alpha[1:-1, 2:], ai)

    inv_h2 = 1.0 / h**2
    diag = (a_w + a_e + a_s + a_n) * inv_h2
    w = -a_w * inv_h2
    e = -a_e * inv_h2
    s = -a_s * inv_h2
    n = -a_n * inv_h2

    adv = problem.advection_function()
    if adv is not None:
        Xi, Yi = Xn[1:-1, 1:-1], Yn[1:-1, 1:-1]
        ax, ay = adv(Xi, Yi)
        ax = np.broadcast_to(np.asarray(ax, dtype=float), ai.shape)
        ay = np.broadcast_to(np.asarray(ay, dtype=float), ai.shape)
        diag = diag + (np.abs(ax) + np.abs(ay)) / h
        w = w - np.maximum(ax, 0.0) / h
        e = e - np.maximum(-ax, 0.0) / h
        s = s - np.maximum(ay, 0.0) / h
        n = n - np.maximum(-ay, 0.0) / h

    idx = np.arange(grid.n_volume).reshape(nx, ny)
    rows = [idx.ravel()]
    cols = [idx.ravel()]
    vals = [diag.ravel()]
    # west / east neighbours (prev / next column)
    rows += [idx[1:, :].ravel(), idx[:-1, :].ravel()]
    cols += [idx[:-1, :].ravel(), idx[1:, :].ravel()]
    vals += [w[1:, :].ravel(), e[:-1, :].ravel()]
    # south / north neighbours (prev / next row)
    rows += [idx[:, 1:].ravel(), idx[:, :-1].ravel()]
    cols += [idx[:, :-1].ravel(), idx[:, 1:].ravel()]
    vals += [s[:, 1:].ravel(), n[:, :-1].ravel()]

    matrix = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(grid.n_volume, grid.n_volume),
    ).tocsr()

    xs, ys = grid.interior_coords()
    Xi, Yi = np.meshgrid(xs, ys, indexing="ij")
    rhs = np.asarray(problem.rhs_function()(Xi, Yi), dtype=float).ravel()
    return VolumeSystem(matrix=matrix, rhs=rhs, grid=grid, problem=problem)


def manufactured_solution(system: VolumeSystem) -> np.ndarray:
    """Exact discrete solution ``u* = A^-1 f`` by one sparse direct solve."""
    return spla.spsolve(system.matrix.tocsc(), system.rhs)
