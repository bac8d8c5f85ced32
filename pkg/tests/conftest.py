"""Shared fixtures: assembled model problems at small levels, built once."""

from dataclasses import dataclass

import numpy as np
import pytest

import subschwarz as ss


@dataclass
class Setup:
    problem: ss.ProblemSpec
    grid: ss.GridSpec
    system: ss.VolumeSystem
    decomposition: ss.DecompositionSpec
    op: ss.SubstructuredOperator
    u_star: np.ndarray
    v_star: np.ndarray


def make_setup(level: int, n_ov: int = 3, rhs: str = "sine2pi") -> Setup:
    problem = ss.ProblemSpec(rhs=rhs)
    grid = ss.make_grid(problem, level)
    system = ss.assemble_volume(problem, grid)
    decomposition = ss.centered_decomposition(grid, n_ov)
    op = ss.build_operator(system, decomposition)
    u_star = ss.manufactured_solution(system)
    v_star = op.exact_traces(u_star)
    return Setup(problem, grid, system, decomposition, op, u_star, v_star)


@pytest.fixture(scope="session")
def laplace_l4() -> Setup:
    return make_setup(4)


@pytest.fixture(scope="session")
def laplace_l5() -> Setup:
    return make_setup(5)


@pytest.fixture(scope="session")
def dense_g_l4(laplace_l4) -> np.ndarray:
    return ss.dense_smoother(laplace_l4.op)
