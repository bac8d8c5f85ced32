"""Command-line entry point.

Two subcommands:

* ``run`` executes one experiment described by a flat key-value config file
  and/or flags (``solve`` histories, ``spectra`` radius sweeps,
  ``theory-table`` closed-form eigenvalue tables) and writes CSV artifacts.
* ``reproduce`` runs a named multi-method sweep and writes one CSV per
  method plus a JSON manifest.

Exit codes: 0 success, 2 configuration/validation error, 3 divergence,
4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import coarse as coarse_mod
from . import solvers, spectral, theory
from .config import CoarseSelector, ExperimentConfig, parse_config_file
from .core import IterationHistory, build_operator, dense_smoother, psm_iterate
from .decomposition import DecompositionSpec, centered_decomposition
from .exceptions import (
    ConfigurationError,
    DivergenceError,
    SizeCapError,
    SubschwarzError,
    ValidationError,
)
from .model_problem import assemble_volume, make_grid, manufactured_solution
from .reporting import (
    RadiusRow,
    write_history_csv,
    write_iterations_csv,
    write_manifest,
    write_radii_csv,
    write_theory_csv,
)

RECIPES = ("fig_convergence_rect", "fig_radii_sweep", "tab_iterations", "jump_channels")


def output_root(cfg_out: str | None) -> Path:
    return Path(cfg_out or os.environ.get("SUBSCHWARZ_OUT", "out"))


def _decomposition(cfg: ExperimentConfig, grid) -> DecompositionSpec:
    if cfg.left_column is not None:
        spec = DecompositionSpec(left_column=cfg.left_column, overlap_cells=cfg.overlap_cells)
        spec.validate(grid)
        return spec
    return centered_decomposition(grid, cfg.n_ov)


def _build_problem(cfg: ExperimentConfig):
    problem = cfg.problem_spec()
    grid = make_grid(problem, cfg.level)
    system = assemble_volume(problem, grid)
    decomp = _decomposition(cfg, grid)
    op = build_operator(system, decomp)
    return problem, system, decomp, op


def _transfer_for(selector: CoarseSelector, op, cfg: ExperimentConfig):
    if selector.family == "geometric":
        return coarse_mod.build_geometric_transfer(op.n2)
    if selector.family == "fourier":
        return coarse_mod.build_fourier_space(selector.m, op.n2).transfer()
    if selector.family == "eigen":
        g = dense_smoother(op)
        return coarse_mod.build_eigen_space(g, op.n2, selector.m).transfer()
    if selector.family == "pca":
        seed = cfg.seed if selector.seed is None else selector.seed
        space = coarse_mod.build_pca_space(
            op, selector.m, q=selector.q, r=selector.r, seed=seed
        )
        return space.transfer()
    if selector.family == "file":
        return coarse_mod.load_coarse_space(selector.path).transfer()
    raise ValidationError(f"unsupported coarse family {selector.family!r}")


def run_solve(cfg: ExperimentConfig) -> list[Path]:
    problem, system, decomp, op = _build_problem(cfg)
    v_exact = op.exact_traces(manufactured_solution(system))
    v0 = None
    if cfg.initial == "random":
        v0 = np.random.default_rng(cfg.seed).standard_normal(op.n)
    metadata = {
        "level": cfg.level,
        "n_ov": decomp.n_ov,
        "n_pre": cfg.n_pre,
        "n_post": cfg.n_post,
        "coarse": "none" if cfg.method == "psm" else CoarseSelector.parse(cfg.coarse).describe(),
    }
    if cfg.method == "gmls":
        metadata["coarse"] = f"geometric-ml:{cfg.level_min}"
    root = output_root(cfg.out)
    tag = metadata["coarse"].replace(":", "-").replace("/", "_")
    path = root / f"history_{cfg.method}_{tag}_l{cfg.level}_nov{decomp.n_ov}.csv"

    try:
        history = _dispatch_solver(cfg, problem, decomp, op, v0, v_exact)
    except DivergenceError as exc:
        if exc.history is not None:
            exc.history.metadata.update(metadata)
            write_history_csv(path, exc.history, seed=cfg.seed, timings=cfg.timings)
            print(f"divergence report: {path}", file=sys.stderr)
        raise
    history.metadata.update(metadata)

    write_history_csv(path, history, seed=cfg.seed, timings=cfg.timings)
    print(f"wrote {path} ({history.iterations} iterations, converged={history.converged})")
    if not history.converged:
        if history.errors[-1] > history.errors[0]:
            raise DivergenceError(
                f"{cfg.method}: error grew from {history.errors[0]:.3e} to "
                f"{history.errors[-1]:.3e} over {history.iterations} iterations "
                f"(report: {path})",
                history=history,
            )
        print("warning: tolerance not reached within maxit", file=sys.stderr)
    return [path]


def _dispatch_solver(cfg, problem, decomp, op, v0, v_exact):
    if cfg.method == "psm":
        history = psm_iterate(
            op, v0, tol=cfg.tol, max_iterations=cfg.maxit, v_exact=v_exact
        )
    elif cfg.method == "gmls":
        hierarchy = solvers.build_hierarchy(
            problem,
            decomp,
            level_max=cfg.level,
            level_min=cfg.level_min,
            kind=cfg.coarse_matrix,
            fine_operator=op,
        )
        history = solvers.gmls_solve(
            hierarchy,
            v0,
            n_pre=cfg.n_pre,
            n_post=cfg.n_post,
            tol=cfg.tol,
            max_cycles=cfg.maxit,
            v_exact=v_exact,
        )
    else:
        selector = CoarseSelector.parse(cfg.coarse)
        transfer = _transfer_for(selector, op, cfg)
        coarse_op = None
        if cfg.coarse_matrix == "rediscretized":
            if decomp.left_column % 2 or decomp.overlap_cells % 2:
                raise ConfigurationError(
                    "rediscretized coarse operator needs interface columns and overlap "
                    "width divisible by 2"
                )
            coarse_decomp = DecompositionSpec(
                left_column=decomp.left_column // 2, overlap_cells=decomp.overlap_cells // 2
            )
            coarse_op = build_operator(
                assemble_volume(problem, make_grid(problem, cfg.level - 1)),
                coarse_decomp,
                with_rhs=False,
            )
        two_cfg = solvers.setup_two_level(
            op,
            transfer,
            coarse_kind=cfg.coarse_matrix,
            coarse_op=coarse_op,
            n_pre=cfg.n_pre,
            n_post=cfg.n_post,
            tol=cfg.tol,
            max_cycles=cfg.maxit,
        )
        runner = {
            "s2s": solvers.two_level_solve,
            "g2s": solvers.two_level_solve,
            "s2s-b1": solvers.s2s_b1_solve,
            "s2s-b2": solvers.s2s_b2_solve,
        }[cfg.method]
        history = runner(op, two_cfg, v0, v_exact=v_exact, method_name=cfg.method)
    return history


def spectra_rows(cfg: ExperimentConfig, level: int, n_ov: int) -> list[RadiusRow]:
    problem = cfg.problem_spec()
    grid = make_grid(problem, level)
    system = assemble_volume(problem, grid)
    decomp = centered_decomposition(grid, n_ov)
    op = build_operator(system, decomp, with_rhs=False)
    is_laplace = problem.operator_kind == "laplace"

    rows: list[RadiusRow] = []
    wanted = cfg.spectra_operators()
    rho1 = rho2 = None
    if is_laplace:
        pair = [
            theory.discrete_strip_pair(k, grid.n_y, grid.n_x, decomp.left_column, decomp.right_column)
            for k in range(1, grid.n_y + 1)
        ]
        rho1 = theory.rho_from_values([p[0] for p in pair])
        rho2 = theory.rho_from_values([p[1] for p in pair])

    g = None
    if "smoother" in wanted or "two_level_interface" in wanted:
        g = dense_smoother(op)
    if "smoother" in wanted:
        radius = spectral.spectral_radius(g)
        ref = np.sqrt(rho1(1) * rho2(1)) if is_laplace else None
        rows.append(RadiusRow("smoother", n_ov, level, radius, ref))
    if "two_level_interface" in wanted:
        transfer = coarse_mod.build_geometric_transfer(op.n2)
        t_mat = spectral.two_level_matrix(g, transfer, n_pre=1, n_post=0)
        radius = spectral.spectral_radius(t_mat)
        ref = None
        if is_laplace:
            factor = theory.g2s_factor(grid.n_y, 1, 0, rho1, rho_other=rho2)
            ref = factor.value if factor.hypothesis_ok else None
        rows.append(RadiusRow("two_level_interface", n_ov, level, radius, ref))
    if "two_level_augmented" in wanted:
        transfer = coarse_mod.build_geometric_transfer(op.n2)
        aug = spectral.assemble_augmented(system, decomp, transfer)
        radius = spectral.spectral_radius(aug.g2l_augmented)
        # shares its non-zero spectrum with the interface two-level operator
        ref = spectral.spectral_radius(aug.g2l_interface)
        rows.append(RadiusRow("two_level_augmented", n_ov, level, radius, ref))
    if "two_level_ras" in wanted:
        ras = spectral.assemble_two_level_ras(system, decomp)
        rows.append(RadiusRow("two_level_ras", n_ov, level, ras.radius()))
    return rows


def run_spectra(cfg: ExperimentConfig) -> list[Path]:
    rows = []
    for n_ov in cfg.sweep_novs():
        rows.extend(spectra_rows(cfg, cfg.level, n_ov))
    root = output_root(cfg.out)
    path = root / f"radii_{cfg.problem}_l{cfg.level}.csv"
    write_radii_csv(path, rows, seed=cfg.seed)
    print(f"wrote {path} ({len(rows)} rows)")
    return [path]


def run_theory_table(cfg: ExperimentConfig) -> list[Path]:
    table = theory.rho_table(cfg.k_max, cfg.length_1, cfg.length_2, cfg.delta, cfg.length_tilde)
    root = output_root(cfg.out)
    path = root / "theory_rho.csv"
    write_theory_csv(path, table, seed=cfg.seed)
    print(f"wrote {path}")
    return [path]


def run(cfg: ExperimentConfig) -> list[Path]:
    if cfg.mode == "solve":
        return run_solve(cfg)
    if cfg.mode == "spectra":
        return run_spectra(cfg)
    return run_theory_table(cfg)


# -- named reproduction recipes -----------------------------------------------------


def reproduce(name: str, out: Path, level: int | None = None, seed: int = 20260810) -> list[Path]:
    if name not in RECIPES:
        raise ValidationError(f"unknown recipe {name!r}; choose from {RECIPES}")
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    files: list[Path] = []
    params: dict = {"seed": seed}

    if name == "fig_convergence_rect":
        level = 6 if level is None else level
        params.update(level=level, n_ov=2, tol=1e-12)
        runs = [
            ("psm", "none"),
            ("g2s", "geometric"),
            ("s2s", "fourier:5"),
            ("s2s", "fourier:10"),
            ("s2s", "fourier:20"),
            ("s2s", "pca:10:20:3:%d" % seed),
        ]
        for method, coarse in runs:
            cfg = ExperimentConfig.from_mappings(
                {
                    "mode": "solve",
                    "problem": "laplace",
                    "level": level,
                    "n_ov": 2,
                    "method": method,
                    "coarse": coarse,
                    "tol": 1e-12,
                    "maxit": 600,
                    "seed": seed,
                    "initial": "random",
                    "out": str(out),
                }
            )
            files.extend(run_solve(cfg))
    elif name == "fig_radii_sweep":
        level = 5 if level is None else level
        params.update(level=level, novs=[1, 3, 5])
        cfg = ExperimentConfig.from_mappings(
            {
                "mode": "spectra",
                "problem": "laplace",
                "level": level,
                "novs": "1,3,5",
                "operators": "two_level_interface,two_level_ras",
                "seed": seed,
                "out": str(out),
            }
        )
        files.extend(run_spectra(cfg))
    elif name == "tab_iterations":
        levels = [5, 6, 7] if level is None else [level]
        params.update(levels=levels, n_ov=3, tol=1e-10)
        histories: list[IterationHistory] = []
        for lev in levels:
            for method in ("g2s", "s2s-b1", "s2s-b2"):
                cfg = ExperimentConfig.from_mappings(
                    {
                        "mode": "solve",
                        "problem": "laplace",
                        "level": lev,
                        "n_ov": 3,
                        "method": method,
                        "coarse": "geometric",
                        "tol": 1e-10,
                        "maxit": 100,
                        "seed": seed,
                    }
                )
                problem, system, decomp, op = _build_problem(cfg)
                v_exact = op.exact_traces(manufactured_solution(system))
                transfer = coarse_mod.build_geometric_transfer(op.n2)
                two_cfg = solvers.setup_two_level(op, transfer, tol=1e-10, max_cycles=100)
                runner = {
                    "g2s": solvers.two_level_solve,
                    "s2s-b1": solvers.s2s_b1_solve,
                    "s2s-b2": solvers.s2s_b2_solve,
                }[method]
                history = runner(op, two_cfg, v_exact=v_exact, method_name=method)
                history.metadata.update(
                    level=lev, n_ov=3, n_pre=1, n_post=0, coarse="geometric"
                )
                histories.append(history)
        path = write_iterations_csv(out / "iterations_geometric.csv", histories, seed=seed)
        files.append(path)
    elif name == "jump_channels":
        level = 6 if level is None else level
        params.update(level=level, alphas=[1e2, 1e4, 1e6], tol=1e-8)
        for alpha in (1e2, 1e4, 1e6):
            cfg = ExperimentConfig.from_mappings(
                {
                    "mode": "solve",
                    "problem": "channels",
                    "rhs": "mixed_sine",
                    "channel_alpha": alpha,
                    "level": level,
                    "n_ov": 3,
                    "method": "g2s",
                    "coarse": "geometric",
                    "tol": 1e-8,
                    "maxit": 100,
                    "seed": seed,
                    "out": str(out / f"alpha_{alpha:.0e}"),
                }
            )
            files.extend(run_solve(cfg))

    manifest = write_manifest(
        out / f"manifest_{name}.json",
        recipe=name,
        seed=seed,
        files=files,
        parameters=params,
        timings={"total": time.perf_counter() - started},
    )
    files.append(manifest)
    return files


# -- argument parsing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subschwarz",
        description="Substructured two-level/multilevel Schwarz solvers and spectral lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one experiment (solve | spectra | theory-table)")
    runp.add_argument("--config", help="flat key-value config file")
    runp.add_argument("--mode", choices=("solve", "spectra", "theory-table"))
    runp.add_argument("--problem", choices=("laplace", "channels", "advection"))
    runp.add_argument("--rhs")
    runp.add_argument("--width", type=float)
    runp.add_argument("--height", type=float)
    runp.add_argument("--diffusion-background", type=float, dest="diffusion_background")
    runp.add_argument("--channels", help="channel boxes 'x0:x1:y0:y1:value[;...]'")
    runp.add_argument("--advection-field", dest="advection_field")
    runp.add_argument("--level", type=int)
    runp.add_argument("--level-min", type=int, dest="level_min")
    runp.add_argument("--n-ov", type=int, dest="n_ov")
    runp.add_argument("--left-column", type=int, dest="left_column")
    runp.add_argument("--overlap-cells", type=int, dest="overlap_cells")
    runp.add_argument("--method", choices=("psm", "s2s", "g2s", "s2s-b1", "s2s-b2", "gmls"))
    runp.add_argument("--coarse", help="fourier:m | eigen:m | pca:m[:q[:r[:seed]]] | geometric | file:path")
    runp.add_argument("--coarse-matrix", choices=("galerkin", "rediscretized"), dest="coarse_matrix")
    runp.add_argument("--n-pre", type=int, dest="n_pre")
    runp.add_argument("--n-post", type=int, dest="n_post")
    runp.add_argument("--tol", type=float)
    runp.add_argument("--maxit", type=int)
    runp.add_argument("--seed", type=int)
    runp.add_argument("--initial", choices=("zero", "random"))
    runp.add_argument("--out")
    runp.add_argument("--channel-alpha", type=float, dest="channel_alpha")
    runp.add_argument("--novs")
    runp.add_argument("--operators")
    runp.add_argument("--length-1", type=float, dest="length_1")
    runp.add_argument("--length-2", type=float, dest="length_2")
    runp.add_argument("--length-tilde", type=float, dest="length_tilde")
    runp.add_argument("--delta", type=float)
    runp.add_argument("--k-max", type=int, dest="k_max")
    runp.add_argument("--timings", action="store_true", default=None)

    rep = sub.add_parser("reproduce", help="run a named sweep and write CSVs + manifest")
    rep.add_argument("name", choices=RECIPES)
    rep.add_argument("--out")
    rep.add_argument("--level", type=int, help="override the recipe's default fine level")
    rep.add_argument("--seed", type=int, default=20260810)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            file_values = parse_config_file(args.config) if args.config else {}
            flag_values = {
                key: value
                for key, value in vars(args).items()
                if key not in ("command", "config") and value is not None
            }
            cfg = ExperimentConfig.from_mappings(file_values, flag_values)
            run(cfg)
        else:
            out = output_root(args.out) / args.name
            reproduce(args.name, out, level=args.level, seed=args.seed)
        return 0
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 3
    except SizeCapError as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return 4
    except (ValidationError, ConfigurationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SubschwarzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
