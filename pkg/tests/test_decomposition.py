import numpy as np
import pytest

import subschwarz as ss
from subschwarz import theory
from subschwarz.exceptions import ConfigurationError, ValidationError


def test_symmetric_split_interface_counts():
    problem = ss.ProblemSpec()
    grid = ss.make_grid(problem, 2)  # (-1,1)x(0,1), 3 interior rows
    system = ss.assemble_volume(problem, grid)
    sub1, sub2 = ss.build_decomposition(system, ss.centered_decomposition(grid, 3))
    assert sub1.n_interface == 3
    assert sub2.n_interface == 3
    assert sub1.size + sub2.size - (sub1.interface_column - sub2.interface_column - 1) * 3 == (
        grid.n_volume
    )


def test_zero_data_zero_force_gives_zero(laplace_l4):
    sub1, _ = ss.build_decomposition(laplace_l4.system, laplace_l4.decomposition)
    out = sub1.solve(interface_data=np.zeros(sub1.n_interface), body_force=np.zeros(sub1.size))
    assert np.all(out == 0.0)


def test_solve_linearity(laplace_l4):
    sub1, _ = ss.build_decomposition(laplace_l4.system, laplace_l4.decomposition)
    rng = np.random.default_rng(7)
    g = rng.standard_normal(sub1.n_interface)
    f = rng.standard_normal(sub1.size)
    combined = sub1.solve(interface_data=g, body_force=f)
    split = sub1.solve(interface_data=g) + sub1.solve(body_force=f)
    assert np.abs(combined - split).max() <= 1e-13 * max(1.0, np.abs(combined).max())


def test_against_brute_force_restricted_problem():
    """Subdomain solve must equal an independently assembled Dirichlet solve."""
    problem = ss.ProblemSpec(rhs="sine2pi")
    grid = ss.make_grid(problem, 4)
    system = ss.assemble_volume(problem, grid)
    spec = ss.centered_decomposition(grid, 3)
    sub1, _ = ss.build_decomposition(system, spec)

    nx_sub = spec.right_column - 1  # interior columns of the left strip
    ny, h = grid.n_y, grid.h
    n = nx_sub * ny
    rng = np.random.default_rng(11)
    w = rng.standard_normal(ny)
    f = rng.standard_normal(n)

    # brute-force dense 5-point assembly with Dirichlet data w on the right edge
    a = np.zeros((n, n))
    rhs = f.copy()
    for i in range(1, nx_sub + 1):
        for j in range(1, ny + 1):
            row = (i - 1) * ny + (j - 1)
            a[row, row] = 4.0 / h**2
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ii, jj = i + di, j + dj
                if jj < 1 or jj > ny:
                    continue
                if ii < 1:
                    continue
                if ii > nx_sub:
                    rhs[row] += w[j - 1] / h**2  # data column just right of the strip
                    continue
                a[row, (ii - 1) * ny + (jj - 1)] = -1.0 / h**2
    expected = np.linalg.solve(a, rhs)
    actual = sub1.solve(interface_data=w, body_force=f)
    assert np.abs(actual - expected).max() <= 1e-11


def test_trace_restriction_is_orthonormal(laplace_l4):
    sub1, sub2 = ss.build_decomposition(laplace_l4.system, laplace_l4.decomposition)
    for sub in (sub1, sub2):
        rows = np.zeros((sub.n_interface, sub.size))
        for k in range(sub.n_interface):
            e = np.zeros(sub.size)
            e[sub._trace.start + k] = 1.0
            rows[k] = e
        assert np.allclose(rows @ rows.T, np.eye(sub.n_interface))


def test_lift_carries_stencil_coupling(laplace_l4):
    grid = laplace_l4.grid
    spec = laplace_l4.decomposition
    sub1, _ = ss.build_decomposition(laplace_l4.system, spec)
    w = np.arange(1.0, grid.n_y + 1.0)
    lifted = sub1.lift(w)
    adjacent = slice((spec.right_column - 2) * grid.n_y, (spec.right_column - 1) * grid.n_y)
    assert np.allclose(lifted[adjacent], -w / grid.h**2)
    mask = np.ones(sub1.size, dtype=bool)
    mask[adjacent] = False
    assert np.all(lifted[mask] == 0.0)


def test_harmonic_extension_of_sine_mode_is_collinear(laplace_l4):
    grid = laplace_l4.grid
    spec = laplace_l4.decomposition
    sub1, _ = ss.build_decomposition(laplace_l4.system, spec)
    psi = ss.sine_basis(grid.n_y, [1])[:, 0]
    trace = sub1.trace(sub1.solve(interface_data=psi))
    ratio = float(trace @ psi)  # psi is unit
    assert np.linalg.norm(trace - ratio * psi) <= 1e-10
    expected = theory.discrete_strip_rho(1, grid.n_y, spec.left_column, spec.right_column)
    assert ratio == pytest.approx(expected, rel=1e-12)


def test_measured_mode_one_matches_continuous_formula(laplace_l4):
    """Half-overlap 2h at level 4 on the (-1,1)x(0,1) rectangle."""
    grid = laplace_l4.grid
    spec = laplace_l4.decomposition
    assert spec.overlap_cells == 4  # n_ov = 3 -> delta = 2h
    delta = spec.delta(grid)
    discrete = theory.discrete_strip_rho(1, grid.n_y, spec.left_column, spec.right_column)
    continuous = theory.rho_rectangle(1, 1.0, delta, 1.0)
    assert abs(discrete - continuous) / continuous < 0.02


def test_repeated_solves_are_bitwise_deterministic(laplace_l4):
    sub1, _ = ss.build_decomposition(laplace_l4.system, laplace_l4.decomposition)
    rng = np.random.default_rng(13)
    g = rng.standard_normal(sub1.n_interface)
    f = rng.standard_normal(sub1.size)
    first = sub1.solve(interface_data=g, body_force=f)
    for _ in range(3):
        again = sub1.solve(interface_data=g, body_force=f)
        assert np.array_equal(first, again)


def test_decomposition_validation():
    problem = ss.ProblemSpec()
    grid = ss.make_grid(problem, 3)
    with pytest.raises(ValidationError):
        ss.DecompositionSpec(left_column=3, overlap_cells=1)  # no interior column inside
    spec = ss.DecompositionSpec(left_column=14, overlap_cells=4)
    with pytest.raises(ConfigurationError):
        spec.validate(grid)  # right column beyond n_x = 15
