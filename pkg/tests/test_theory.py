import math

import numpy as np
import pytest

from subschwarz import theory
from subschwarz.exceptions import ValidationError


def test_rho_rectangle_spot_value():
    assert theory.rho_rectangle(1, 1.0, 0.1, 1.0) == pytest.approx(0.5321508081029848, abs=1e-12)


def test_rho_rectangle_vanishes_as_overlap_fills_subdomain():
    vals = [theory.rho_rectangle(1, 1.0, d) for d in (0.9, 0.99, 0.999)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 5e-3


def test_rho_rectangle_monotone_in_mode():
    vals = [theory.rho_rectangle(k, 1.0, 0.1) for k in range(1, 21)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_rho_rectangle_validation():
    with pytest.raises(ValidationError):
        theory.rho_rectangle(1, 1.0, 1.5)
    with pytest.raises(ValidationError):
        theory.rho_rectangle(0, 1.0, 0.1)


def test_rho_rectangle_overflow_safe():
    assert theory.rho_rectangle(500, 1.0, 0.01) == pytest.approx(
        math.exp(-2 * 500 * math.pi * 0.01), rel=1e-6
    )


def test_discrete_strip_rho_converges_to_continuous():
    errors = []
    for level in (4, 5, 6):
        n = 2**level - 1
        cells = 2 ** (level - 2)  # fixed physical overlap 2*delta = 1/4
        left = (2 * (n + 1) - cells) // 2
        discrete = theory.discrete_strip_rho(1, n, left, left + cells)
        errors.append(abs(discrete - theory.rho_rectangle(1, 1.0, 0.125)))
    order = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    assert all(1.7 <= o <= 2.3 for o in order)


def test_s2s_factor_cases():
    rho1 = lambda k: 0.5**k
    rho2 = lambda k: 0.3**k
    m = 2
    r1, r2 = rho1(3), rho2(3)
    # both odd
    assert theory.s2s_factor(m, 1, 1, rho1, rho2) == pytest.approx((r1 * r2) ** 1.0)
    # both even
    assert theory.s2s_factor(m, 2, 2, rho1, rho2) == pytest.approx((r1 * r2) ** 2.0)
    # mixed parity
    assert theory.s2s_factor(m, 1, 0, rho1, rho2) == pytest.approx(max(r1, r2))
    assert theory.s2s_factor(m, 2, 1, rho1, rho2) == pytest.approx((r1 * r2) * max(r1, r2))


def test_s2s_factor_equal_rhos_make_cases_agree():
    rho = lambda k: 0.7 / k
    for n1, n2 in ((1, 0), (2, 1), (1, 1), (2, 2)):
        s = n1 + n2
        assert theory.s2s_factor(3, n1, n2, rho, rho) == pytest.approx(rho(4) ** s)


def test_s2s_factor_no_coarse_space_is_one_level():
    rho = lambda k: 0.6 / k
    # m = 0: plain alternating iteration factor per double step
    assert theory.s2s_factor(0, 1, 1, rho, rho) == pytest.approx(rho(1) ** 2)


def test_generic_two_level_factor():
    lam = [0.9, -0.8, 0.7j, 0.5, 0.1]
    assert theory.generic_two_level_factor(lam, 0) == pytest.approx(0.9)
    assert theory.generic_two_level_factor(lam, 2) == pytest.approx(0.7)
    assert theory.generic_two_level_factor([0.5] * 7, 3) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        theory.generic_two_level_factor(lam, 5)


def test_mode_pair_block_zero_smoother_annihilates():
    zero = lambda k: 0.0
    blocks = theory.g2s_blocks(1, 15, zero, zero, 1, 0)
    assert np.abs(blocks.g_block).max() == 0.0


def test_mode_pair_block_eigenvalues_match_closed_forms():
    """4x4 block spectrum: two zeros plus the two displayed quotients."""
    n_fine = 15
    rho = theory.rho_from_values([0.8 * (0.75**k) for k in range(n_fine)])
    for n1, n2 in ((1, 0), (1, 1), (2, 1)):
        s = n1 + n2
        for k in (1, 3, 7):
            blocks = theory.g2s_blocks(k, n_fine, rho, rho, n1, n2)
            eigs = np.sort(np.abs(np.linalg.eigvals(blocks.g_block)))
            c4, s4 = blocks.cos2**2, blocks.sin2**2
            rk, rkh = rho(k), rho(blocks.k_hi)
            lam3 = (c4 * (1 - rk) * rkh**s + s4 * (1 - rkh) * rk**s) / (
                c4 * (1 - rk) + s4 * (1 - rkh)
            )
            lam4 = (c4 * (1 + rk) * rkh**s + s4 * (1 + rkh) * rk**s) / (
                c4 * (1 + rk) + s4 * (1 + rkh)
            )
            assert eigs[0] <= 1e-14 and eigs[1] <= 1e-14
            assert sorted([eigs[2], eigs[3]]) == pytest.approx(sorted([lam4, lam3]), abs=1e-12)
            assert lam3 >= lam4 - 1e-15  # dominant quotient is the displayed factor


def test_middle_mode_block_collapses_to_power():
    n_fine = 15
    rho = theory.rho_from_values(np.linspace(0.9, 0.1, n_fine))
    even = theory.middle_mode_block(n_fine, rho, rho, 1, 1)
    k_mid = (n_fine + 1) // 2
    assert np.allclose(even, rho(k_mid) ** 2 * np.eye(2))
    odd = theory.middle_mode_block(n_fine, rho, rho, 1, 0)
    assert np.allclose(np.sort(np.abs(np.linalg.eigvals(odd))), [rho(k_mid)] * 2)


def test_g2s_factor_zero_rho():
    zero = lambda k: 0.0
    assert theory.g2s_factor(15, 1, 0, zero).value == 0.0


def test_g2s_factor_middle_mode_term():
    """At the self-aliasing mode the factor term reduces to rho^(n1+n2)."""
    n_fine = 15
    k_mid = (n_fine + 1) // 2
    rho = theory.rho_from_values(np.linspace(0.9, 0.8999, n_fine))  # nearly flat
    fac = theory.g2s_factor(n_fine, 1, 1, rho)
    assert fac.value == pytest.approx(rho(1) ** 2, rel=1e-3)
    assert fac.value < 1.0


def test_g2s_factor_below_one_and_flags():
    n_fine = 31
    good = theory.rho_from_values([0.9 * math.exp(-0.2 * k) for k in range(n_fine)])
    fac = theory.g2s_factor(n_fine, 1, 0, good)
    assert fac.hypothesis_ok
    assert 0.0 < fac.value < 1.0
    other = theory.rho_from_values([0.5 * math.exp(-0.2 * k) for k in range(n_fine)])
    flagged = theory.g2s_factor(n_fine, 1, 0, good, rho_other=other)
    assert not flagged.hypothesis_ok
    assert flagged.value == fac.value


def test_rho_table_columns():
    table = theory.rho_table(5, 1.0, 0.8, 0.1)
    assert table.shape == (5, 3)
    assert table[0, 1] == pytest.approx(theory.rho_rectangle(1, 1.0, 0.1))
    assert table[0, 2] == pytest.approx(theory.rho_rectangle(1, 0.8, 0.1))
