"""Interface-level (substructured) operators and the one-level iteration.

Interface vectors are plain 1-D arrays with the fixed block layout
``[values on Gamma_2, values on Gamma_1]``:  the first block is the trace
datum produced by subdomain 1, the second the one produced by subdomain 2.
The one-level smoother is

    G v = [ trace_2(A_1^{-1}(-E_1 v_g1)),  trace_1(A_2^{-1}(-E_2 v_g2)) ]

and the substructured system reads ``(I - G) v = b`` with
``b = [trace_2(A_1^{-1} f_1), trace_1(A_2^{-1} f_2)]``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .decomposition import DecompositionSpec, SubdomainSolver, build_decomposition
from .exceptions import DivergenceError, SizeCapError, ValidationError
from .model_problem import VolumeSystem

DENSE_CAP = 2048

#: Error growth that trips the divergence guard: 10x over this many steps.
DIVERGENCE_WINDOW = 5
DIVERGENCE_FACTOR = 10.0


def norm_2inf(v: np.ndarray, n_first_block: int) -> float:
    """Max of the blockwise Euclidean norms of an interface vector."""
    return max(
        float(np.linalg.norm(v[:n_first_block])),
        float(np.linalg.norm(v[n_first_block:])),
    )


class SubstructuredOperator:
    """Matrix-free action of the interface smoother G and system I - G.

    The substructured right-hand side for the volume force given at
    construction is computed once (one subdomain solve pair) and cached as
    ``rhs``.  ``smoother_calls`` counts applications of G; solvers use it
    to account for subdomain solves (one call = one solve pair).
    """

    def __init__(self, sub1: SubdomainSolver, sub2: SubdomainSolver, body_force=None):
        self.sub1 = sub1
        self.sub2 = sub2
        self.n2 = sub1.n_interface  # Gamma_2 block size (produced by subdomain 1)
        self.n1 = sub2.n_interface
        self.n = self.n1 + self.n2
        self.smoother_calls = 0
        self.body_force = None if body_force is None else np.asarray(body_force, dtype=float)
        self.rhs = (
            np.zeros(self.n) if body_force is None else self.substructured_rhs(self.body_force)
        )

    # -- interface vector layout -------------------------------------------------
    def split(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if v.shape[0] != self.n:
            raise ValidationError(f"interface vector has length {v.shape[0]}, expected {self.n}")
        return v[: self.n2], v[self.n2 :]

    def join(self, on_gamma2: np.ndarray, on_gamma1: np.ndarray) -> np.ndarray:
        return np.concatenate([on_gamma2, on_gamma1])

    def zero(self) -> np.ndarray:
        return np.zeros(self.n)

    def norm(self, v: np.ndarray) -> float:
        return norm_2inf(v, self.n2)

    # -- operator actions ----------------------------------------------------------
    def apply_smoother(self, v: np.ndarray) -> np.ndarray:
        """One application of G: exactly one (independent) subdomain solve pair."""
        v_g2, v_g1 = self.split(v)
        out_g2 = self.sub1.trace(self.sub1.solve(interface_data=v_g1))
        out_g1 = self.sub2.trace(self.sub2.solve(interface_data=v_g2))
        self.smoother_calls += 1
        return self.join(out_g2, out_g1)

    def apply_system(self, v: np.ndarray) -> np.ndarray:
        """Action of I - G (same solves as the smoother, one subtraction)."""
        return v - self.apply_smoother(v)

    def apply_smoother_to_columns(self, m: np.ndarray) -> np.ndarray:
        out = np.empty_like(m)
        for k in range(m.shape[1]):
            out[:, k] = self.apply_smoother(m[:, k])
        return out

    def substructured_rhs(self, volume_force: np.ndarray) -> np.ndarray:
        f = np.asarray(volume_force, dtype=float)
        b_g2 = self.sub1.trace(self.sub1.solve(body_force=f[self.sub1.body_slice()]))
        b_g1 = self.sub2.trace(self.sub2.solve(body_force=f[self.sub2.body_slice()]))
        return self.join(b_g2, b_g1)

    # -- volume <-> interface ---------------------------------------------------
    def harmonic_extension(self, v: np.ndarray, body_force=None) -> np.ndarray:
        """Merged volume field of the two subdomain solves for interface data v.

        Subdomain 1 supplies the columns up to the overlap mid-column,
        subdomain 2 the rest; at the substructured solution both agree on
        the whole overlap, so any convex split works.
        """
        f = self.body_force if body_force is None else np.asarray(body_force, dtype=float)
        v_g2, v_g1 = self.split(v)
        f1 = None if f is None else f[self.sub1.body_slice()]
        f2 = None if f is None else f[self.sub2.body_slice()]
        u1 = self.sub1.solve(interface_data=v_g1, body_force=f1)
        u2 = self.sub2.solve(interface_data=v_g2, body_force=f2)
        ny = self.sub1.n_interface
        mid = (self.sub1.trace_column + self.sub1.interface_column) // 2
        n_volume = self.sub2.offset + self.sub2.size
        merged = np.empty(n_volume)
        merged[: mid * ny] = u1[: mid * ny]
        merged[mid * ny :] = u2[mid * ny - self.sub2.offset :]
        return merged

    def exact_traces(self, volume_values: np.ndarray) -> np.ndarray:
        """Interface vector of traces of a volume field."""
        ny = self.sub1.n_interface
        g2 = self.sub1.trace_column
        g1 = self.sub2.trace_column
        on_g2 = volume_values[(g2 - 1) * ny : g2 * ny]
        on_g1 = volume_values[(g1 - 1) * ny : g1 * ny]
        return self.join(on_g2, on_g1)


def build_operator(
    system: VolumeSystem, spec: DecompositionSpec, with_rhs: bool = True
) -> SubstructuredOperator:
    """Assemble subdomain solvers and wrap them as a substructured operator."""
    sub1, sub2 = build_decomposition(system, spec)
    op = SubstructuredOperator(sub1, sub2, body_force=system.rhs if with_rhs else None)
    op.grid = system.grid
    op.decomposition = spec
    return op


def dense_smoother(op: SubstructuredOperator, cap: int | None = None) -> np.ndarray:
    """Dense matrix of G (column j equals G applied to the j-th unit vector).

    Assembled from the two harmonic-trace blocks, which batches the unit
    vector solves against the cached factorizations.
    """
    cap = DENSE_CAP if cap is None else cap
    if op.n > cap:
        raise SizeCapError(f"dense smoother of size {op.n} exceeds cap {cap}")
    g = np.zeros((op.n, op.n))
    g[: op.n2, op.n2 :] = op.sub1.harmonic_block()
    g[op.n2 :, : op.n2] = op.sub2.harmonic_block()
    return g


def dense_system(op: SubstructuredOperator, cap: int | None = None) -> np.ndarray:
    return np.eye(op.n) - dense_smoother(op, cap)


@dataclass
class IterationHistory:
    """Per-iteration record of one solver run.

    ``errors[k]`` is the relative 2,inf-norm error against the reference
    solution after k iterations (entry 0 is the initial guess); when no
    reference is available it falls back to the relative residual, which is
    also recorded separately.
    """

    method: str
    errors: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    wall_times: list[float] = field(default_factory=list)
    iterates: list[np.ndarray] | None = None
    converged: bool = False
    smoother_calls: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.errors) - 1

    def contraction_estimate(self, window: int = 5) -> float:
        """Geometric-mean error reduction per iteration over the last steps."""
        errs = [e for e in self.errors if e > 0]
        if len(errs) < 2:
            return 0.0
        w = min(window, len(errs) - 1)
        return (errs[-1] / errs[-1 - w]) ** (1.0 / w)


class HistoryRecorder:
    """Collects norms, checks the stopping test and the divergence guard.

    Monitoring never issues subdomain solves of its own as long as either a
    reference solution is available (error metric) or the caller hands over
    a residual it computed inside the cycle anyway; this keeps the
    smoother-call accounting of the solvers exact.
    """

    def __init__(self, op, method, v_exact=None, tol=None, record_iterates=False, metadata=None):
        self.op = op
        self.v_exact = v_exact
        # Relative to the exact solution; for error-decay studies around the
        # zero solution fall back to the initial error (set on first record).
        self.exact_norm = None if v_exact is None else op.norm(v_exact)
        rhs_norm = op.norm(op.rhs)
        self.rhs_norm = rhs_norm if rhs_norm > 0.0 else 1.0
        self.tol = tol
        self.start = time.perf_counter()
        self.history = IterationHistory(
            method=method,
            iterates=[] if record_iterates else None,
            metadata=dict(metadata or {}),
        )

    def record(self, v: np.ndarray, residual: float | None = None) -> bool:
        """Append one iterate; return True when the stopping test fires.

        ``residual`` is a relative residual norm the solver already has
        (for the two-level methods: of the pre-correction iterate).  If it
        is missing and no reference solution exists, the residual is
        computed here at the price of one extra smoother application.
        """
        h = self.history
        if residual is None and self.v_exact is None:
            residual = self.op.norm(self.op.rhs - self.op.apply_system(v)) / self.rhs_norm
        if self.v_exact is not None:
            if self.exact_norm == 0.0 and not h.errors:
                self.exact_norm = self.op.norm(v - self.v_exact)
            metric = self.op.norm(v - self.v_exact) / (self.exact_norm or 1.0)
        else:
            metric = residual
        h.errors.append(metric)
        h.residuals.append(float("nan") if residual is None else residual)
        h.wall_times.append(time.perf_counter() - self.start)
        if h.iterates is not None:
            h.iterates.append(v.copy())
        k = len(h.errors) - 1
        if (
            k >= DIVERGENCE_WINDOW
            and h.errors[k] > DIVERGENCE_FACTOR * h.errors[k - DIVERGENCE_WINDOW]
            and h.errors[k] > 1e-13
        ):
            h.smoother_calls = self.op.smoother_calls
            raise DivergenceError(
                f"{h.method}: error grew from {h.errors[k - DIVERGENCE_WINDOW]:.3e} to "
                f"{h.errors[k]:.3e} over {DIVERGENCE_WINDOW} iterations",
                history=h,
            )
        done = self.tol is not None and metric <= self.tol
        h.converged = h.converged or done
        return done

    def finish(self, calls_before: int) -> IterationHistory:
        self.history.smoother_calls = self.op.smoother_calls - calls_before
        return self.history


def psm_iterate(
    op: SubstructuredOperator,
    v0: np.ndarray | None = None,
    n: int | None = None,
    *,
    tol: float | None = None,
    max_iterations: int = 1000,
    v_exact: np.ndarray | None = None,
    record_iterates: bool = False,
) -> IterationHistory:
    """One-level fixed-point iteration ``v <- G v + b``.

    Either a fixed iteration count ``n`` or a tolerance must be given.
    """
    if n is None and tol is None:
        raise ValidationError("psm_iterate needs an iteration count or a tolerance")
    limit = n if n is not None else max_iterations
    if limit < 1:
        raise ValidationError("iteration count must be >= 1")
    v = op.zero() if v0 is None else np.asarray(v0, dtype=float).copy()
    calls_before = op.smoother_calls
    rec = HistoryRecorder(
        op, "psm", v_exact=v_exact, tol=tol, record_iterates=record_iterates
    )
    rec.record(v)
    for _ in range(limit):
        v = op.apply_smoother(v) + op.rhs
        if rec.record(v) and n is None:
            break
    return rec.finish(calls_before)
