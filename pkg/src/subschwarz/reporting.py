"""CSV and manifest output.

All files share one convention: optional ``# key=value`` comment lines
(carrying at least the RNG seed), then a header row, then comma-separated
data rows.  Floats are written in scientific notation with 17 significant
digits so 64-bit values round-trip exactly; given the same configuration
and seed the bodies are byte-identical across runs.  Per-iteration wall
times are real measurements and therefore only written on request.

History schema::

    method,level,n_ov,n_pre,n_post,coarse,iteration,rel_error,rel_residual[,wall_time_s]

Spectral-radius schema::

    operator,n_ov,level,rho_numeric,rho_theory,gap
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

from .core import IterationHistory

HISTORY_COLUMNS = [
    "method",
    "level",
    "n_ov",
    "n_pre",
    "n_post",
    "coarse",
    "iteration",
    "rel_error",
    "rel_residual",
]
RADII_COLUMNS = ["operator", "n_ov", "level", "rho_numeric", "rho_theory", "gap"]
THEORY_COLUMNS = ["k", "rho_1", "rho_2"]
ITERATIONS_COLUMNS = [
    "method",
    "level",
    "n_ov",
    "n_pre",
    "n_post",
    "coarse",
    "iterations",
    "final_error",
]


def fmt(value) -> str:
    """Round-trip exact float formatting; empty cell for missing values."""
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, ".16e")
    return str(value)


def _write(path: Path, comments: dict, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {key}={value}" for key, value in comments.items()]
    lines.append(",".join(header))
    lines.extend(",".join(fmt(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def write_history_csv(
    path, history: IterationHistory, seed: int | None = None, timings: bool = False
) -> Path:
    path = Path(path)
    meta = history.metadata
    fixed = [
        history.method,
        meta.get("level", ""),
        meta.get("n_ov", ""),
        meta.get("n_pre", ""),
        meta.get("n_post", ""),
        meta.get("coarse", "none"),
    ]
    header = HISTORY_COLUMNS + (["wall_time_s"] if timings else [])
    rows = []
    for k, (err, res) in enumerate(zip(history.errors, history.residuals)):
        row = fixed + [k, err, res]
        if timings:
            row.append(history.wall_times[k])
        rows.append(row)
    _write(path, {"seed": seed if seed is not None else "none"}, header, rows)
    return path


@dataclass
class RadiusRow:
    operator: str
    n_ov: int
    level: int
    rho_numeric: float
    rho_theory: float | None = None

    @property
    def gap(self) -> float | None:
        if self.rho_theory is None:
            return None
        return abs(self.rho_numeric - self.rho_theory) / max(abs(self.rho_theory), 1e-300)


def write_radii_csv(path, rows: list[RadiusRow], seed: int | None = None) -> Path:
    path = Path(path)
    data = [
        [row.operator, row.n_ov, row.level, row.rho_numeric, row.rho_theory, row.gap]
        for row in rows
    ]
    _write(path, {"seed": seed if seed is not None else "none"}, RADII_COLUMNS, data)
    return path


def write_theory_csv(path, table, seed: int | None = None) -> Path:
    path = Path(path)
    rows = [[int(k), r1, r2] for k, r1, r2 in table]
    _write(path, {"seed": seed if seed is not None else "none"}, THEORY_COLUMNS, rows)
    return path


def write_iterations_csv(path, histories: list[IterationHistory], seed=None) -> Path:
    path = Path(path)
    rows = []
    for h in histories:
        meta = h.metadata
        rows.append(
            [
                h.method,
                meta.get("level", ""),
                meta.get("n_ov", ""),
                meta.get("n_pre", ""),
                meta.get("n_post", ""),
                meta.get("coarse", "none"),
                h.iterations,
                h.errors[-1],
            ]
        )
    _write(path, {"seed": seed if seed is not None else "none"}, ITERATIONS_COLUMNS, rows)
    return path


def write_manifest(path, recipe: str, seed, files: list[Path], parameters: dict, timings: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "recipe": recipe,
        "seed": seed,
        "created_unix": time.time(),
        "files": [str(f) for f in files],
        "parameters": parameters,
        "timings_s": timings,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
