import numpy as np
import pytest

import subschwarz as ss
from subschwarz import spectral
from subschwarz.exceptions import DivergenceError, SizeCapError, ValidationError


def test_smoother_on_zero(laplace_l4):
    op = laplace_l4.op
    assert np.all(op.apply_smoother(op.zero()) == 0.0)


def test_system_is_identity_minus_smoother(laplace_l4):
    op = laplace_l4.op
    rng = np.random.default_rng(0)
    v = rng.standard_normal(op.n)
    gv = op.apply_smoother(v)
    assert np.allclose(op.apply_system(v), v - gv, atol=1e-15)


def test_rhs_linearity(laplace_l4):
    op = laplace_l4.op
    rng = np.random.default_rng(1)
    f1 = rng.standard_normal(laplace_l4.grid.n_volume)
    f2 = rng.standard_normal(laplace_l4.grid.n_volume)
    lhs = op.substructured_rhs(2.0 * f1 - 3.0 * f2)
    rhs = 2.0 * op.substructured_rhs(f1) - 3.0 * op.substructured_rhs(f2)
    assert np.abs(lhs - rhs).max() <= 1e-13 * max(1.0, np.abs(lhs).max())


def test_exact_traces_satisfy_interface_system(laplace_l4):
    op, v_star = laplace_l4.op, laplace_l4.v_star
    assert np.abs(op.apply_system(v_star) - op.rhs).max() <= 1e-10


def test_error_recurrence_matches_direct_iteration(laplace_l4):
    """Running on v and on the error e = v* - v must be the same iteration."""
    op, v_star = laplace_l4.op, laplace_l4.v_star
    rng = np.random.default_rng(3)
    v = rng.standard_normal(op.n)
    e = v_star - v
    for _ in range(4):
        v = op.apply_smoother(v) + op.rhs
        e = op.apply_smoother(e)
        assert np.abs((v_star - v) - e).max() <= 1e-13 * max(1.0, np.abs(e).max())


def test_fixed_point_stays(laplace_l4):
    op, v_star = laplace_l4.op, laplace_l4.v_star
    moved = op.apply_smoother(v_star) + op.rhs
    assert op.norm(moved - v_star) <= 1e-11 * op.norm(v_star)


def test_psm_contraction_matches_dense_radius(laplace_l4, dense_g_l4):
    op, v_star = laplace_l4.op, laplace_l4.v_star
    rho = spectral.spectral_radius(dense_g_l4)
    rng = np.random.default_rng(5)
    v0 = v_star + rng.standard_normal(op.n)  # error with full modal content
    hist = ss.psm_iterate(op, v0, n=40, v_exact=v_star)
    observed = (hist.errors[40] / hist.errors[20]) ** (1.0 / 20.0)
    assert observed == pytest.approx(rho, rel=0.02)


def test_psm_zero_problem_stays_zero():
    problem = ss.ProblemSpec(rhs="zero")
    grid = ss.make_grid(problem, 3)
    system = ss.assemble_volume(problem, grid)
    op = ss.build_operator(system, ss.centered_decomposition(grid, 3))
    hist = ss.psm_iterate(op, n=3, v_exact=op.zero())
    assert all(e == 0.0 for e in hist.errors)


def test_sine_modes_are_exact_eigenvectors(laplace_l4):
    rho1, rho2, residual = spectral.measure_interface_spectrum(laplace_l4.op)
    assert residual <= 1e-10
    assert np.all(np.diff(np.abs(rho1)) < 0)  # moduli decrease with the mode index
    assert np.all(np.diff(np.abs(rho2)) < 0)


def test_harmonic_extension_recovers_volume_solution(laplace_l4):
    op, u_star, v_star = laplace_l4.op, laplace_l4.u_star, laplace_l4.v_star
    merged = op.harmonic_extension(v_star)
    assert np.abs(merged - u_star).max() <= 1e-10 * max(1.0, np.abs(u_star).max())


def test_harmonic_extension_zero():
    problem = ss.ProblemSpec(rhs="zero")
    grid = ss.make_grid(problem, 3)
    op = ss.build_operator(ss.assemble_volume(problem, grid), ss.centered_decomposition(grid, 3))
    assert np.all(op.harmonic_extension(op.zero()) == 0.0)


def test_subdomain_solutions_agree_on_overlap(laplace_l4):
    op, v_star = laplace_l4.op, laplace_l4.v_star
    f = laplace_l4.system.rhs
    v_g2, v_g1 = op.split(v_star)
    u1 = op.sub1.solve(interface_data=v_g1, body_force=f[op.sub1.body_slice()])
    u2 = op.sub2.solve(interface_data=v_g2, body_force=f[op.sub2.body_slice()])
    ny = laplace_l4.grid.n_y
    for col in range(op.sub2.interface_column + 1, op.sub1.interface_column):
        c1 = u1[(col - 1) * ny : col * ny]
        c2 = u2[(col - 1) * ny - op.sub2.offset : col * ny - op.sub2.offset]
        assert np.abs(c1 - c2).max() <= 1e-10


def test_interface_system_invertible_when_contracting(laplace_l4, dense_g_l4):
    assert spectral.spectral_radius(dense_g_l4) < 1.0
    a = np.eye(laplace_l4.op.n) - dense_g_l4
    assert np.linalg.matrix_rank(a) == laplace_l4.op.n


def test_dense_smoother_matches_columnwise_application(laplace_l4, dense_g_l4):
    op = laplace_l4.op
    rng = np.random.default_rng(9)
    for _ in range(3):
        v = rng.standard_normal(op.n)
        assert np.abs(dense_g_l4 @ v - op.apply_smoother(v)).max() <= 1e-12


def test_dense_smoother_cap():
    with pytest.raises(SizeCapError):
        ss.dense_smoother(FakeOp(), cap=4)


class FakeOp:
    n = 10


def test_divergence_guard():
    class Doubling:
        n = 4
        n2 = 2
        rhs = np.zeros(4)

        def zero(self):
            return np.zeros(4)

        def norm(self, v):
            return float(np.linalg.norm(v))

        def apply_smoother(self, v):
            return 2.0 * v

        def apply_system(self, v):
            return v - self.apply_smoother(v)

    op = Doubling()
    op.smoother_calls = 0
    with pytest.raises(DivergenceError) as info:
        ss.psm_iterate(op, np.ones(4), n=40, v_exact=np.zeros(4))
    assert info.value.history is not None


def test_psm_requires_count_or_tol(laplace_l4):
    with pytest.raises(ValidationError):
        ss.psm_iterate(laplace_l4.op)
