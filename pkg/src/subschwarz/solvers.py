"""Two-level and multilevel stationary solvers on the interface system.

All solvers share the stationary structure "smooth, coarse-correct,
smooth"; one cycle of the basic two-level method applies the error operator

    T = G^{n_post} (I - P Ac^{-1} R (I - G)) G^{n_pre}.

The economical variants trade the residual's smoother application for the
precomputed product ``G P``:  variant B1 reproduces the basic iterates
exactly while spending one smoother application per cycle after the first;
variant B2 realizes the iteration matrix ``G (I - P Ac^{-1} R A)`` with one
application per cycle from the start.  The multilevel method recurses the
two-level cycle through a hierarchy of coarsened interface grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .coarse import (
    CoarseOperator,
    TransferPair,
    build_coarse_operator,
    build_geometric_transfer,
    galerkin_coarse_matrix,
)
from .core import (
    HistoryRecorder,
    IterationHistory,
    SubstructuredOperator,
    build_operator,
    dense_smoother,
)
from .decomposition import DecompositionSpec
from .exceptions import ConfigurationError, ValidationError
from .model_problem import GridSpec, ProblemSpec, assemble_volume, make_grid


@dataclass
class TwoLevelConfig:
    """Everything one two-level solve needs besides the fine operator."""

    transfer: TransferPair
    coarse: CoarseOperator
    smoothed_prolongation: np.ndarray  # G P, reused by the economical variants
    n_pre: int = 1
    n_post: int = 0
    tol: float = 1e-10
    max_cycles: int = 200

    def __post_init__(self):
        if self.n_pre < 0 or self.n_post < 0 or self.n_pre + self.n_post < 1:
            raise ValidationError("two-level methods need at least one smoothing step per cycle")
        if self.tol <= 0:
            raise ValidationError("tolerance must be positive")


def setup_two_level(
    op: SubstructuredOperator,
    transfer: TransferPair,
    *,
    coarse_kind: str = "galerkin",
    coarse_op: SubstructuredOperator | None = None,
    n_pre: int = 1,
    n_post: int = 0,
    tol: float = 1e-10,
    max_cycles: int = 200,
) -> TwoLevelConfig:
    """Build (and rank-check) the coarse operator and bundle the solver config."""
    coarse, smoothed_p = build_coarse_operator(op, transfer, kind=coarse_kind, coarse_op=coarse_op)
    return TwoLevelConfig(
        transfer=transfer,
        coarse=coarse,
        smoothed_prolongation=smoothed_p,
        n_pre=n_pre,
        n_post=n_post,
        tol=tol,
        max_cycles=max_cycles,
    )


def two_level_solve(
    op: SubstructuredOperator,
    cfg: TwoLevelConfig,
    v0: np.ndarray | None = None,
    *,
    v_exact: np.ndarray | None = None,
    record_iterates: bool = False,
    method_name: str = "two_level",
) -> IterationHistory:
    """Basic two-level cycle: pre-smooth, coarse-correct the residual, post-smooth.

    The stopping test runs after post-smoothing; the post-smoothed iterate
    seeds the next cycle.
    """
    p, r = cfg.transfer.prolongation, cfg.transfer.restriction
    b = op.rhs
    v = op.zero() if v0 is None else np.asarray(v0, dtype=float).copy()
    calls_before = op.smoother_calls
    rec = HistoryRecorder(
        op, method_name, v_exact=v_exact, tol=cfg.tol, record_iterates=record_iterates
    )
    rec.record(v)
    for _ in range(cfg.max_cycles):
        for _ in range(cfg.n_pre):
            v = op.apply_smoother(v) + b
        residual = b - op.apply_system(v)
        coarse_update = cfg.coarse.solve(r @ residual)
        v = v + p @ coarse_update
        for _ in range(cfg.n_post):
            v = op.apply_smoother(v) + b
        if rec.record(v, residual=op.norm(residual) / rec.rhs_norm):
            break
    return rec.finish(calls_before)


def _require_b1_shape(cfg: TwoLevelConfig, name: str) -> None:
    if cfg.n_pre != 1 or cfg.n_post != 0:
        raise ValidationError(f"{name} is defined for one pre-smoothing step only")


def s2s_b1_solve(
    op: SubstructuredOperator,
    cfg: TwoLevelConfig,
    v0: np.ndarray | None = None,
    *,
    v_exact: np.ndarray | None = None,
    record_iterates: bool = False,
    method_name: str = "s2s-b1",
) -> IterationHistory:
    """Economical reformulation producing the basic method's iterates exactly.

    The smoothed iterate needed by the next cycle is assembled from the
    stored smoother output and ``G P`` applied to the coarse update, so
    every cycle after the first costs a single smoother application.
    """
    _require_b1_shape(cfg, "s2s_b1_solve")
    p, r, gp = cfg.transfer.prolongation, cfg.transfer.restriction, cfg.smoothed_prolongation
    b = op.rhs
    u = op.zero() if v0 is None else np.asarray(v0, dtype=float).copy()
    calls_before = op.smoother_calls
    rec = HistoryRecorder(
        op, method_name, v_exact=v_exact, tol=cfg.tol, record_iterates=record_iterates
    )
    rec.record(u)
    u1 = op.apply_smoother(u) + b
    smoothed = op.apply_smoother(u1)
    for cycle in range(cfg.max_cycles):
        residual = b - u1 + smoothed
        update = cfg.coarse.solve(r @ residual)
        u = u1 + p @ update
        if rec.record(u, residual=op.norm(residual) / rec.rhs_norm):
            break
        if cycle == cfg.max_cycles - 1:
            break
        u1 = smoothed + gp @ update + b  # equals G u + b without a new solve pair
        smoothed = op.apply_smoother(u1)
    return rec.finish(calls_before)


def s2s_b2_solve(
    op: SubstructuredOperator,
    cfg: TwoLevelConfig,
    v0: np.ndarray | None = None,
    *,
    v_exact: np.ndarray | None = None,
    record_iterates: bool = False,
    method_name: str = "s2s-b2",
) -> IterationHistory:
    """Post-smoothing reformulation with one smoother application per cycle.

    Realizes the iteration matrix ``G (I - P Ac^{-1} R A)``; same asymptotic
    contraction as the pre-smoothing variants (the two matrix orderings
    share their non-zero spectrum), cheaper first cycle.
    """
    _require_b1_shape(cfg, "s2s_b2_solve")
    r, gp = cfg.transfer.restriction, cfg.smoothed_prolongation
    b = op.rhs
    u = op.zero() if v0 is None else np.asarray(v0, dtype=float).copy()
    calls_before = op.smoother_calls
    rec = HistoryRecorder(
        op, method_name, v_exact=v_exact, tol=cfg.tol, record_iterates=record_iterates
    )
    rec.record(u)
    for _ in range(cfg.max_cycles):
        smoothed = op.apply_smoother(u)
        residual = b - u + smoothed
        update = cfg.coarse.solve(r @ residual)
        u = smoothed + gp @ update + b
        if rec.record(u, residual=op.norm(residual) / rec.rhs_norm):
            break
    return rec.finish(calls_before)


# -- multilevel ---------------------------------------------------------------------


@dataclass
class Level:
    """One grid level: a matrix-free interface operator or a dense matrix."""

    operator: SubstructuredOperator | None = None
    matrix: np.ndarray | None = None  # dense I - G on this level (projected kind)
    transfer_down: TransferPair | None = None  # to the next coarser level

    @property
    def size(self) -> int:
        return self.operator.n if self.operator is not None else self.matrix.shape[0]

    def smooth(self, v: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.operator is not None:
            return self.operator.apply_smoother(v) + b
        return v - self.matrix @ v + b

    def apply_system(self, v: np.ndarray) -> np.ndarray:
        if self.operator is not None:
            return self.operator.apply_system(v)
        return self.matrix @ v


@dataclass
class MultilevelHierarchy:
    """Interface operators on a nest of dyadically coarsened grids."""

    levels: dict[int, Level]
    level_min: int
    level_max: int
    kind: str  # "rediscretized" | "galerkin"
    _coarsest_lu: tuple = field(default=None, repr=False)

    @property
    def fine_operator(self) -> SubstructuredOperator:
        return self.levels[self.level_max].operator

    def coarsest_solve(self, b: np.ndarray) -> np.ndarray:
        return scipy.linalg.lu_solve(self._coarsest_lu, b)


def build_hierarchy(
    problem: ProblemSpec,
    decomposition: DecompositionSpec,
    level_max: int,
    level_min: int,
    *,
    kind: str = "rediscretized",
    fine_operator: SubstructuredOperator | None = None,
) -> MultilevelHierarchy:
    """Build the level operators and inter-level transfers.

    Every coarsening halves the interface grid, so the interface columns
    and the overlap width must stay on grid lines down to ``level_min``:
    both must be divisible by ``2^(level_max - level_min)``.
    """
    if kind not in ("rediscretized", "galerkin"):
        raise ValidationError(f"unknown hierarchy kind {kind!r}")
    depth = level_max - level_min
    if depth < 1:
        raise ValidationError("hierarchy needs at least two levels")
    if level_min < 2:
        raise ValidationError("coarsest level must be >= 2")
    scale = 2**depth
    if decomposition.left_column % scale or decomposition.overlap_cells % scale:
        raise ConfigurationError(
            f"interface columns {decomposition.left_column}, overlap "
            f"{decomposition.overlap_cells} cells are not representable on "
            f"level {level_min} (need divisibility by {scale})"
        )

    levels: dict[int, Level] = {}
    if fine_operator is None:
        fine_operator = build_operator(
            assemble_volume(problem, make_grid(problem, level_max)), decomposition
        )
    levels[level_max] = Level(
        operator=fine_operator,
        transfer_down=build_geometric_transfer(2**level_max - 1),
    )
    for lev in range(level_max - 1, level_min - 1, -1):
        shrink = 2 ** (level_max - lev)
        if kind == "rediscretized":
            spec = DecompositionSpec(
                left_column=decomposition.left_column // shrink,
                overlap_cells=decomposition.overlap_cells // shrink,
            )
            operator = build_operator(
                assemble_volume(problem, make_grid(problem, lev)), spec, with_rhs=False
            )
            levels[lev] = Level(operator=operator)
        else:
            above = levels[lev + 1]
            t = above.transfer_down
            if above.operator is not None:
                matrix, _ = galerkin_coarse_matrix(above.operator, t)
            else:
                matrix = t.restriction @ above.matrix @ t.prolongation
            levels[lev] = Level(matrix=matrix)
        if lev > level_min:
            levels[lev].transfer_down = build_geometric_transfer(2**lev - 1)

    coarsest = levels[level_min]
    if coarsest.matrix is None:
        coarsest.matrix = np.eye(coarsest.operator.n) - dense_smoother(coarsest.operator)
    hierarchy = MultilevelHierarchy(
        levels=levels, level_min=level_min, level_max=level_max, kind=kind
    )
    hierarchy._coarsest_lu = scipy.linalg.lu_factor(coarsest.matrix)
    return hierarchy


def gmls_vcycle(
    hierarchy: MultilevelHierarchy,
    level: int,
    u0: np.ndarray,
    b: np.ndarray,
    n_pre: int = 1,
    n_post: int = 0,
) -> np.ndarray:
    """One V-cycle: exact solve on the coarsest level, else smooth,
    restrict the residual, recurse from a zero guess, correct, smooth."""
    if level == hierarchy.level_min:
        return hierarchy.coarsest_solve(b)
    lev = hierarchy.levels[level]
    u = u0
    for _ in range(n_pre):
        u = lev.smooth(u, b)
    residual = b - lev.apply_system(u)
    t = lev.transfer_down
    coarse_update = gmls_vcycle(
        hierarchy,
        level - 1,
        np.zeros(t.n_coarse),
        t.restriction @ residual,
        n_pre,
        n_post,
    )
    u = u + t.prolongation @ coarse_update
    for _ in range(n_post):
        u = lev.smooth(u, b)
    return u


def gmls_solve(
    hierarchy: MultilevelHierarchy,
    v0: np.ndarray | None = None,
    *,
    n_pre: int = 1,
    n_post: int = 0,
    tol: float = 1e-10,
    max_cycles: int = 200,
    v_exact: np.ndarray | None = None,
    record_iterates: bool = False,
) -> IterationHistory:
    """Iterate V-cycles on the finest level until the stopping test fires."""
    if n_pre + n_post < 1:
        raise ValidationError("multilevel cycles need at least one smoothing step")
    op = hierarchy.fine_operator
    v = op.zero() if v0 is None else np.asarray(v0, dtype=float).copy()
    calls_before = op.smoother_calls
    rec = HistoryRecorder(
        op, "gmls", v_exact=v_exact, tol=tol, record_iterates=record_iterates
    )
    rec.record(v)
    for _ in range(max_cycles):
        v = gmls_vcycle(hierarchy, hierarchy.level_max, v, op.rhs, n_pre, n_post)
        if rec.record(v):
            break
    return rec.finish(calls_before)
