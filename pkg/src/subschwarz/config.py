"""Experiment configuration: flat key-value files plus CLI overrides."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .exceptions import ValidationError
from .model_problem import ChannelBox, ProblemSpec

MODES = ("solve", "spectra", "theory-table")
METHODS = ("psm", "s2s", "g2s", "s2s-b1", "s2s-b2", "gmls")
PROBLEMS = ("laplace", "channels", "advection")
SPECTRA_OPERATORS = (
    "smoother",
    "two_level_interface",
    "two_level_augmented",
    "two_level_ras",
)


def parse_config_file(path) -> dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment, blank lines ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


@dataclass
class CoarseSelector:
    """Parsed coarse-space selector.

    Accepted forms: ``fourier:m``, ``eigen:m``, ``pca:m[:q[:r[:seed]]]``,
    ``geometric``, ``file:path``.
    """

    family: str
    m: int | None = None
    q: int | None = None
    r: int = 3
    seed: int | None = None
    path: str | None = None

    @classmethod
    def parse(cls, text: str) -> "CoarseSelector":
        parts = text.split(":")
        family = parts[0]
        try:
            if family == "geometric":
                if len(parts) != 1:
                    raise ValueError("geometric takes no parameters")
                return cls(family=family)
            if family == "file":
                if len(parts) != 2:
                    raise ValueError("file selector needs a path")
                return cls(family=family, path=parts[1])
            if family in ("fourier", "eigen"):
                if len(parts) != 2:
                    raise ValueError(f"{family} selector needs exactly one parameter m")
                return cls(family=family, m=int(parts[1]))
            if family == "pca":
                if not 2 <= len(parts) <= 5:
                    raise ValueError("pca selector is pca:m[:q[:r[:seed]]]")
                m = int(parts[1])
                q = int(parts[2]) if len(parts) > 2 else None
                r = int(parts[3]) if len(parts) > 3 else 3
                seed = int(parts[4]) if len(parts) > 4 else None
                return cls(family=family, m=m, q=q, r=r, seed=seed)
        except ValueError as exc:
            raise ValidationError(f"coarse: bad selector {text!r}: {exc}") from exc
        raise ValidationError(
            f"coarse: unknown family {family!r} (expected fourier, eigen, pca, geometric, file)"
        )

    def describe(self) -> str:
        if self.family == "geometric":
            return "geometric"
        if self.family == "file":
            return f"file:{self.path}"
        if self.family == "pca":
            return f"pca:{self.m}:{self.q}:{self.r}:{self.seed}"
        return f"{self.family}:{self.m}"


_FIELD_TYPES = {
    "mode": str,
    "problem": str,
    "rhs": str,
    "width": float,
    "height": float,
    "diffusion_background": float,
    "channels": str,
    "advection_field": str,
    "level": int,
    "level_min": int,
    "n_ov": int,
    "left_column": int,
    "overlap_cells": int,
    "method": str,
    "coarse": str,
    "n_pre": int,
    "n_post": int,
    "tol": float,
    "maxit": int,
    "seed": int,
    "initial": str,
    "out": str,
    "channel_alpha": float,
    "coarse_matrix": str,
    "novs": str,
    "operators": str,
    "length_1": float,
    "length_2": float,
    "length_tilde": float,
    "delta": float,
    "k_max": int,
    "timings": bool,
}


@dataclass
class ExperimentConfig:
    """One experiment: problem, grid, decomposition, method, outputs."""

    mode: str = "solve"
    problem: str = "laplace"
    rhs: str = "sine2pi"
    width: float = 2.0
    height: float = 1.0
    diffusion_background: float = 1.0
    channels: str | None = None  # "x0:x1:y0:y1:value[;...]"; default boxes otherwise
    advection_field: str = "swirl"
    level: int = 5
    level_min: int | None = None  # multilevel coarsest level
    n_ov: int | None = 3  # centered placement; or give the columns explicitly
    left_column: int | None = None
    overlap_cells: int | None = None
    method: str = "g2s"
    coarse: str = "geometric"
    n_pre: int = 1
    n_post: int = 0
    tol: float = 1e-10
    maxit: int = 200
    seed: int = 20260810
    initial: str = "zero"  # or "random": seeded normal initial interface guess
    out: str | None = None
    channel_alpha: float = 1e4
    coarse_matrix: str = "galerkin"  # or "rediscretized"
    novs: str = "1,3,5"  # spectra mode sweep
    operators: str = "two_level_interface,two_level_ras"
    length_1: float = 1.0  # theory-table geometry
    length_2: float = 1.0
    length_tilde: float = 1.0
    delta: float = 0.1
    k_max: int = 20
    timings: bool = False

    @classmethod
    def from_mappings(cls, *mappings: dict) -> "ExperimentConfig":
        """Later mappings override earlier ones; values are cast per field."""
        cfg = cls()
        known = {f.name for f in fields(cls)}
        for mapping in mappings:
            for key, value in mapping.items():
                if value is None:
                    continue
                name = key.replace("-", "_")
                if name not in known:
                    raise ValidationError(f"unknown configuration key {key!r}")
                caster = _FIELD_TYPES[name]
                try:
                    if caster is bool and isinstance(value, str):
                        value = value.lower() in ("1", "true", "yes", "on")
                    else:
                        value = caster(value)
                except (TypeError, ValueError) as exc:
                    raise ValidationError(f"{key}: cannot parse {value!r}: {exc}") from exc
                setattr(cfg, name, value)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValidationError(f"mode: {self.mode!r} is not one of {MODES}")
        if self.problem not in PROBLEMS:
            raise ValidationError(f"problem: {self.problem!r} is not one of {PROBLEMS}")
        if self.method not in METHODS:
            raise ValidationError(f"method: {self.method!r} is not one of {METHODS}")
        if self.level < 2:
            raise ValidationError(f"level: must be >= 2, got {self.level}")
        if self.tol <= 0:
            raise ValidationError("tol: must be positive")
        if self.maxit < 1:
            raise ValidationError("maxit: must be >= 1")
        if (self.left_column is None) != (self.overlap_cells is None):
            raise ValidationError(
                "left_column and overlap_cells must be given together (or use n_ov)"
            )
        if self.left_column is None and self.n_ov is None:
            raise ValidationError("give either n_ov or left_column/overlap_cells")
        if self.method != "psm":
            CoarseSelector.parse(self.coarse)
        if self.coarse_matrix not in ("galerkin", "rediscretized"):
            raise ValidationError("coarse_matrix: expected 'galerkin' or 'rediscretized'")
        if self.initial not in ("zero", "random"):
            raise ValidationError("initial: expected 'zero' or 'random'")
        if self.method == "gmls":
            if self.level_min is None:
                raise ValidationError("gmls: level_min is required")
            if not 2 <= self.level_min < self.level:
                raise ValidationError("gmls: need 2 <= level_min < level")
        for op_name in self.spectra_operators():
            if op_name not in SPECTRA_OPERATORS:
                raise ValidationError(
                    f"operators: {op_name!r} is not one of {SPECTRA_OPERATORS}"
                )
        if self.channel_alpha <= 0:
            raise ValidationError("channel_alpha: must be positive")

    def sweep_novs(self) -> list[int]:
        try:
            return [int(tok) for tok in self.novs.split(",") if tok.strip()]
        except ValueError as exc:
            raise ValidationError(f"novs: {self.novs!r} is not a comma list of ints") from exc

    def spectra_operators(self) -> list[str]:
        return [tok.strip() for tok in self.operators.split(",") if tok.strip()]

    def problem_spec(self) -> ProblemSpec:
        if self.problem == "laplace":
            return ProblemSpec(
                width=self.width, height=self.height, operator_kind="laplace", rhs=self.rhs
            )
        if self.problem == "channels":
            boxes = (
                parse_channels(self.channels)
                if self.channels
                else default_channels(self.channel_alpha)
            )
            return ProblemSpec(
                width=self.width,
                height=self.height,
                operator_kind="diffusion_variable",
                diffusion_background=self.diffusion_background,
                channels=boxes,
                rhs=self.rhs,
            )
        return ProblemSpec(
            width=self.width,
            height=self.height,
            operator_kind="advection_diffusion",
            diffusion_background=self.diffusion_background,
            advection=self.advection_field,
            rhs=self.rhs,
        )


def parse_channels(text: str) -> tuple[ChannelBox, ...]:
    """Parse 'x0:x1:y0:y1:value' boxes separated by ';'."""
    boxes = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        fields = part.split(":")
        if len(fields) != 5:
            raise ValidationError(
                f"channels: expected 'x0:x1:y0:y1:value', got {part!r}"
            )
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise ValidationError(f"channels: cannot parse {part!r}: {exc}") from exc
        boxes.append(ChannelBox(*values))
    if not boxes:
        raise ValidationError("channels: no boxes given")
    return tuple(boxes)


def default_channels(alpha: float) -> tuple[ChannelBox, ...]:
    """Two horizontal high-diffusion channels crossing both interfaces.

    The channels span the full width: a channel that ends inside the domain
    carries smoother modes with eigenvalues 1 - O(1/alpha) that no coarse
    interface grid can represent, and the two-grid interface method stalls
    (a spectral coarse space holding those two modes fixes it).
    """
    return (
        ChannelBox(x_lo=-1.0, x_hi=1.0, y_lo=0.25, y_hi=0.375, value=alpha),
        ChannelBox(x_lo=-1.0, x_hi=1.0, y_lo=0.625, y_hi=0.75, value=alpha),
    )
