import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from tensorcp import (
    CheckConfig,
    Status,
    add,
    build_g_matrix,
    build_null_diagonal,
    check_delta_shift,
    check_p,
    check_p0,
    check_r,
    check_r0,
    check_semimonotone,
    check_semipositive,
    check_strictly_semimonotone,
    check_strictly_semipositive,
    g_combination,
    grid_violation_scan,
    identity_tensor,
    make_tensor,
    q_falsifier,
    scale,
    shao_product,
    tv_contract,
    zero_tensor,
)
from tensorcp.classes import _validate_witness

from test_core import random_tensor


class TestSemipositive:
    def test_semipositive_fixture_is_member(self, ex_semipos):
        v = check_semipositive(ex_semipos)
        assert v.status is Status.MEMBER_UP_TO_RESOLUTION
        assert v.resolution == 1.0 / 32

    def test_non_semipositive_fixture(self, ex_nonsemipos):
        v = check_semipositive(ex_nonsemipos)
        assert v.status is Status.NON_MEMBER
        assert_array_equal(v.witness, [1.0, 1.0])
        assert_array_equal(v.certificate, [-3.0, -1.0])

    def test_not_row_diagonal_fixture_is_member(self, ex_not_rowdiag):
        assert check_semipositive(ex_not_rowdiag).is_member

    def test_witness_revalidates(self, ex_nonsemipos):
        v = check_semipositive(ex_nonsemipos)
        fresh = tv_contract(ex_nonsemipos, v.witness)
        supp = v.witness > 1e-9
        assert np.all(fresh[supp] < -1e-9)

    def test_strict_identity_member(self):
        assert check_strictly_semipositive(identity_tensor(4, 2)).is_member

    def test_strict_fails_whenever_plain_fails(self, ex_nonsemipos):
        v = check_strictly_semipositive(ex_nonsemipos)
        assert v.status is Status.NON_MEMBER
        assert_array_equal(v.witness, [1.0, 1.0])

    def test_strict_zero_tensor_non_member(self):
        v = check_strictly_semipositive(zero_tensor(4, 2))
        assert v.status is Status.NON_MEMBER
        assert np.max(np.abs(v.certificate)) == 0.0

    def test_plain_zero_tensor_member(self):
        assert check_semipositive(zero_tensor(4, 2)).is_member

    def test_dim1_exact(self):
        neg = make_tensor(3, 1, {(1, 1, 1): -2.0})
        v = check_semipositive(neg)
        assert v.status is Status.NON_MEMBER
        pos = make_tensor(3, 1, {(1, 1, 1): 2.0})
        assert check_semipositive(pos).status is Status.MEMBER_EXACT

    def test_scaling_invariance_of_verdicts(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            m = random_tensor(rng, 4, 2)
            d = np.diag(rng.uniform(0.3, 3.0, 2))
            a = check_semipositive(m)
            b = check_semipositive(shao_product(d, m))
            if not a.is_member:
                # witness reusable verbatim for the scaled tensor
                assert _validate_witness(
                    shao_product(d, m), a.witness, CheckConfig(), strict=False, pairwise=False
                )
            if not b.is_member:
                assert _validate_witness(
                    m, b.witness, CheckConfig(), strict=False, pairwise=False
                )

    def test_permutation_equivariance_of_witness(self, ex_nonsemipos):
        from tensorcp import permute_conjugate

        p = np.array([[0.0, 1.0], [1.0, 0.0]])
        b = permute_conjugate(p, ex_nonsemipos)
        v = check_semipositive(ex_nonsemipos)
        assert _validate_witness(b, p @ v.witness, CheckConfig(), strict=False, pairwise=False)

    def test_monotone_sum_over_grid(self):
        rng = np.random.default_rng(9)
        cfg = CheckConfig()
        for _ in range(10):
            m = random_tensor(rng, 4, 2)
            if not check_semipositive(m, cfg).is_member:
                continue
            entries = [(idx, abs(v)) for idx, v in random_tensor(rng, 4, 2).entries()]
            n_ = make_tensor(4, 2, entries)
            assert grid_violation_scan(add(m, n_), cfg) is None

    def test_principal_subtensor_inheritance(self):
        from tensorcp import principal_subtensor

        rng = np.random.default_rng(13)
        cfg = CheckConfig()
        hits = 0
        for _ in range(30):
            m = random_tensor(rng, 4, 3)
            sub = principal_subtensor(m, [1, 2])
            v = check_semipositive(sub, cfg)
            if v.is_member:
                continue
            hits += 1
            lifted = np.zeros(3)
            lifted[:2] = v.witness
            assert _validate_witness(m, lifted, cfg, strict=False, pairwise=False)
        assert hits > 0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CheckConfig(grid_resolution=1)
        with pytest.raises(ValueError):
            CheckConfig(tol_pos=0.0)


class TestSemimonotone:
    def test_member_case_analysis(self):
        a = [[1.0, -1.0], [0.0, 2.0]]
        assert check_semimonotone(a).status is Status.MEMBER_EXACT
        assert check_strictly_semimonotone(a).status is Status.MEMBER_EXACT

    def test_negative_singleton(self):
        v = check_semimonotone([[-1.0]])
        assert v.status is Status.NON_MEMBER
        assert_array_equal(v.witness, [1.0])

    def test_identity_member(self):
        assert check_semimonotone(np.eye(3)).status is Status.MEMBER_EXACT

    def test_strict_catches_zero_diagonal(self):
        v = check_strictly_semimonotone(np.zeros((2, 2)))
        assert v.status is Status.NON_MEMBER

    def test_witness_lifted_to_full_dimension(self):
        a = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]])
        v = check_semimonotone(a)
        assert v.status is Status.NON_MEMBER
        assert v.witness.shape == (3,)
        assert_array_equal(v.witness, [0.0, 1.0, 0.0])

    def test_non_square_rejected(self):
        with pytest.raises(ValueError, match="square"):
            check_semimonotone(np.ones((2, 3)))

    def test_agreement_with_grid_oracle(self):
        # Grid NonMember implies LP NonMember; LP witnesses re-validate
        # exactly (integer arithmetic on scaled grid points).
        from test_lp import brute_force_minimax

        rng = np.random.default_rng(21)
        for _ in range(100):
            a = rng.integers(-2, 3, size=(3, 3)).astype(float)
            lp_verdict = check_semimonotone(a)
            grid_bad = False
            import itertools as it

            for size in range(1, 4):
                for J in it.combinations(range(3), size):
                    sub = a[np.ix_(J, J)]
                    if brute_force_minimax(sub) < 0:
                        grid_bad = True
            if grid_bad:
                assert not lp_verdict.is_member
            if not lp_verdict.is_member:
                z = lp_verdict.witness
                supp = z > 0
                assert np.all((a @ z)[supp] < 0)


class TestConstructions:
    def test_null_diagonal_fixture(self, ex_nonsemipos):
        d = build_null_diagonal(ex_nonsemipos, [1.0, 1.0])
        assert dict(d.entries()) == {(1, 1, 1, 1): 3.0, (2, 2, 2, 2): 1.0}
        assert_array_equal(tv_contract(add(ex_nonsemipos, d), [1.0, 1.0]), [0.0, 0.0])

    def test_null_diagonal_zero_tensor(self):
        d = build_null_diagonal(zero_tensor(4, 2), [0.5, 2.0])
        assert d.nnz == 0

    def test_null_diagonal_identity(self):
        d = build_null_diagonal(identity_tensor(4, 2), [1.0, 1.0])
        assert dict(d.entries()) == {(1, 1, 1, 1): -1.0, (2, 2, 2, 2): -1.0}
        assert_array_equal(
            tv_contract(add(identity_tensor(4, 2), d), [1.0, 1.0]), [0.0, 0.0]
        )

    def test_null_diagonal_requires_positive_vector(self, ex_nonsemipos):
        with pytest.raises(ValueError, match="not positive"):
            build_null_diagonal(ex_nonsemipos, [1.0, 0.0])

    def test_null_diagonal_random_residual(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            m = random_tensor(rng, 4, 3)
            u = rng.uniform(0.25, 2.0, 3)
            d = build_null_diagonal(m, u)
            assert np.max(np.abs(tv_contract(add(m, d), u)), initial=0.0) <= 1e-10

    def test_g_matrix_fixture(self, ex_nonsemipos):
        g = build_g_matrix(ex_nonsemipos, [1.0, 1.0])
        assert_allclose(np.diag(g), [0.75, 0.5], rtol=0, atol=0)
        combo = g_combination(ex_nonsemipos, g)
        assert_allclose(tv_contract(combo, [1.0, 1.0]), [0.0, 0.0], atol=1e-12)

    def test_g_matrix_zero_tensor(self):
        g = build_g_matrix(zero_tensor(4, 2), [1.0, 0.0])
        assert_array_equal(g, np.zeros((2, 2)))

    def test_g_matrix_one_on_dead_support(self):
        # u_1 = 0 with a nonzero first contraction component forces g_11 = 1.
        m = make_tensor(4, 2, {(1, 2, 2, 2): -1.0})
        g = build_g_matrix(m, [0.0, 1.0])
        assert g[0, 0] == 1.0

    def test_g_matrix_rejects_bad_hypothesis(self):
        m = make_tensor(4, 2, {(1, 1, 1, 1): 1.0})
        with pytest.raises(ValueError, match="precondition"):
            build_g_matrix(m, [1.0, 0.0])

    def test_g_matrix_rejects_zero_vector(self, ex_nonsemipos):
        with pytest.raises(ValueError, match="nonzero"):
            build_g_matrix(ex_nonsemipos, [0.0, 0.0])


class TestDeltaShift:
    def test_member_fixture(self, ex_semipos):
        rep = check_delta_shift(ex_semipos, [1.0])
        assert rep.base.is_member
        assert rep.member_consistent is True

    def test_non_member_fixture(self, ex_nonsemipos):
        rep = check_delta_shift(ex_nonsemipos, [0.1])
        assert not rep.base.is_member
        assert not rep.shifts[0][1].is_member
        assert rep.smallest_delta == 0.1
        assert rep.carryover_margin < 0

    def test_zero_tensor_shift_is_member(self):
        rep = check_delta_shift(zero_tensor(4, 2), [1.0])
        assert rep.shifts[0][1].is_member

    def test_rejects_nonpositive_delta(self, ex_semipos):
        with pytest.raises(ValueError, match="positive"):
            check_delta_shift(ex_semipos, [0.0])


class TestPChecks:
    def test_identity_is_p(self):
        assert check_p(identity_tensor(4, 2)).is_member

    def test_fixture_not_p(self, ex_nonsemipos):
        v = check_p(ex_nonsemipos)
        assert v.status is Status.NON_MEMBER
        assert_array_equal(v.witness, [1.0, 1.0])
        prods = v.witness * v.certificate
        assert np.all(prods[np.abs(v.witness) > 1e-9] < 0)

    def test_zero_tensor_p0_member_p_non_member(self):
        assert check_p0(zero_tensor(4, 2)).is_member
        assert not check_p(zero_tensor(4, 2)).is_member

    def test_signed_witness_found(self):
        # Negative orthant violation: order 2, entries force u < 0 to break P0.
        m = make_tensor(2, 2, {(1, 1): -1.0, (2, 2): -1.0})
        v = check_p0(m)
        assert v.status is Status.NON_MEMBER


class TestSolverBackedChecks:
    def test_identity_is_r0(self):
        assert check_r0(identity_tensor(4, 2)).is_member

    def test_negated_identity_not_r(self):
        neg = scale(-1.0, identity_tensor(4, 2))
        v = check_r(neg)
        assert v.status is Status.NON_MEMBER
        # w = -u^3 + e vanishes at the witness, so it solves the all-ones
        # problem with a nonzero u.
        w = tv_contract(neg, v.witness) + 1.0
        assert np.all(v.witness >= 0) and np.max(v.witness) > 0
        assert np.all(w >= -1e-9)

    def test_zero_tensor_not_r0(self):
        v = check_r0(zero_tensor(4, 2))
        assert v.status is Status.NON_MEMBER
        assert np.max(v.witness) > 0

    def test_budget_guard(self):
        from tensorcp import SolverConfig

        big = zero_tensor(2, 25)
        with pytest.raises(ValueError, match="budget"):
            check_r0(big, SolverConfig(newton_starts=100))

    def test_q_falsifier_identity_clean(self):
        rep = q_falsifier(identity_tensor(4, 2), 100)
        assert rep.attempted == 100
        assert rep.failures == 0

    def test_q_falsifier_zero_tensor_fails(self):
        rep = q_falsifier(zero_tensor(4, 2), 12)
        assert rep.failures > 0
        assert any(np.min(q) < 0 for q in rep.unsolved)

    def test_q_falsifier_strictly_semipositive_clean(self):
        rng = np.random.default_rng(3)
        found = 0
        for _ in range(10):
            m = random_tensor(rng, 4, 2)
            if not check_strictly_semipositive(m).is_member:
                continue
            found += 1
            assert q_falsifier(m, 16).failures == 0
        assert found > 0
