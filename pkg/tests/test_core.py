import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from tensorcp import (
    Tensor,
    add,
    contract_batch,
    identity_tensor,
    is_null_vector,
    is_row_diagonal,
    majorization,
    make_tensor,
    permute_conjugate,
    principal_subtensor,
    row_subtensor,
    scalar_form,
    scale,
    shao_product,
    tensor_from_matrix,
    to_dense,
    tv_contract,
    vec_power,
    zero_tensor,
)
from tensorcp.core import (
    is_diagonal_matrix,
    is_nonnegative_diagonal,
    is_permutation_matrix,
    is_positive_diagonal,
)

from conftest import poly_nonsemipos, poly_semipos, rational_points


def random_tensor(rng, order, dim, density=0.4):
    entries = []
    idx = [()]
    for _ in range(order):
        idx = [t + (i,) for t in idx for i in range(1, dim + 1)]
    for t in idx:
        if rng.random() < density:
            entries.append((t, float(rng.integers(-3, 4))))
    return make_tensor(order, dim, [(t, v) for t, v in entries if v != 0.0])


class TestMakeTensor:
    def test_example_fixture_roundtrips_entries(self, ex_nonsemipos):
        entries = dict(ex_nonsemipos.entries())
        assert entries[(1, 1, 1, 1)] == 1.0
        assert entries[(2, 1, 2, 1)] == -3.0
        assert ex_nonsemipos.nnz == 7

    def test_zero_tensor_is_empty(self):
        assert zero_tensor(4, 2).nnz == 0
        assert make_tensor(4, 2, []) == zero_tensor(4, 2)

    def test_duplicate_tuple_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            make_tensor(4, 2, [((1, 1, 1, 1), 1.0), ((1, 1, 1, 1), 2.0)])

    def test_out_of_range_index_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            make_tensor(4, 2, [((1, 1, 3, 1), 1.0)])

    def test_wrong_arity_rejected(self):
        with pytest.raises(ValueError, match="expected 4 indices"):
            make_tensor(4, 2, [((1, 1, 1), 1.0)])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="not finite"):
            make_tensor(2, 2, [((1, 1), float("nan"))])

    def test_zero_values_dropped(self):
        m = make_tensor(2, 2, [((1, 1), 0.0), ((1, 2), 5.0)])
        assert m.nnz == 1

    def test_equality_is_map_equality(self):
        a = make_tensor(2, 2, [((1, 2), 1.0)])
        b = make_tensor(2, 2, {(1, 2): 1.0})
        assert a == b
        assert a != make_tensor(2, 2, [((1, 2), 2.0)])
        assert a != make_tensor(3, 2, [((1, 2, 1), 1.0)])


class TestContraction:
    def test_fixture_at_ones(self, ex_nonsemipos):
        assert_array_equal(tv_contract(ex_nonsemipos, [1.0, 1.0]), [-3.0, -1.0])

    def test_identity_gives_componentwise_power(self):
        assert_array_equal(tv_contract(identity_tensor(4, 2), [2.0, 3.0]), [8.0, 27.0])

    def test_fixture_matches_polynomial_oracle(self, ex_semipos):
        # Oracle: the closed-form polynomial evaluated independently.
        expected = poly_semipos(np.array([1.0, 1.0, 1.0]))
        assert_array_equal(expected, [3.0, 3.0, -6.0])
        assert_array_equal(tv_contract(ex_semipos, [1.0, 1.0, 1.0]), expected)

    def test_oracle_agreement_at_rational_points(self, ex_nonsemipos):
        for u in rational_points(25, 2):
            got = tv_contract(ex_nonsemipos, u)
            want = poly_nonsemipos(u)
            assert_allclose(got, want, rtol=1e-12, atol=1e-15)

    def test_dimension_mismatch(self, ex_nonsemipos):
        with pytest.raises(ValueError, match="dimension mismatch"):
            tv_contract(ex_nonsemipos, [1.0, 1.0, 1.0])

    def test_batch_matches_scalar_path(self, ex_semipos):
        rng = np.random.default_rng(3)
        X = rng.uniform(-2, 2, size=(40, 3))
        V = contract_batch(ex_semipos, X)
        for k in range(X.shape[0]):
            assert_allclose(V[k], tv_contract(ex_semipos, X[k]), rtol=1e-12, atol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(1, 400).map(lambda s: np.random.default_rng(s)),
        st.floats(0.1, 3.0),
    )
    def test_homogeneity(self, rng, t):
        m = random_tensor(rng, 3, 3)
        u = rng.uniform(-1.5, 1.5, 3)
        lhs = tv_contract(m, t * u)
        rhs = t**2 * tv_contract(m, u)
        assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 400).map(lambda s: np.random.default_rng(s)))
    def test_linearity(self, rng):
        m = random_tensor(rng, 4, 2)
        n = random_tensor(rng, 4, 2)
        u = rng.uniform(-1.5, 1.5, 2)
        assert_allclose(
            tv_contract(add(m, n), u),
            tv_contract(m, u) + tv_contract(n, u),
            rtol=1e-12,
            atol=1e-12,
        )
        alpha = float(rng.uniform(-2, 2))
        assert_allclose(
            tv_contract(scale(alpha, m), u),
            alpha * tv_contract(m, u),
            rtol=1e-12,
            atol=1e-12,
        )

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 400).map(lambda s: np.random.default_rng(s)))
    def test_identity_contraction_law(self, rng):
        r = int(rng.integers(2, 5))
        n = int(rng.integers(1, 4))
        u = rng.uniform(-2, 2, n)
        assert_array_equal(tv_contract(identity_tensor(r, n), u), vec_power(u, r - 1))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 400).map(lambda s: np.random.default_rng(s)))
    def test_support_locality(self, rng):
        m = random_tensor(rng, 4, 3)
        J = sorted(rng.choice([1, 2, 3], size=2, replace=False).tolist())
        sub = principal_subtensor(m, J)
        u = np.zeros(3)
        vals = rng.uniform(0.1, 2.0, len(J))
        u[[j - 1 for j in J]] = vals
        full = tv_contract(m, u)
        local = tv_contract(sub, vals)
        for pos, j in enumerate(J):
            assert full[j - 1] == local[pos]


class TestScalarForm:
    def test_fixture(self, ex_nonsemipos):
        assert scalar_form(ex_nonsemipos, [1.0, 1.0]) == -4.0

    def test_zero_vector(self, ex_semipos):
        assert scalar_form(ex_semipos, [0.0, 0.0, 0.0]) == 0.0

    def test_identity(self):
        assert scalar_form(identity_tensor(4, 2), [2.0, 3.0]) == 97.0

    def test_matches_dot_of_contraction(self, ex_semipos):
        u = np.array([0.3, -1.2, 0.7])
        want = float(np.dot(u, tv_contract(ex_semipos, u)))
        assert math.isclose(scalar_form(ex_semipos, u), want, rel_tol=1e-12)


class TestVecPower:
    def test_square_root(self):
        assert_array_equal(vec_power([4.0, 9.0], 0.5), [2.0, 3.0])

    def test_cube(self):
        assert_array_equal(vec_power([2.0, 3.0], 3), [8.0, 27.0])

    def test_identity_power(self):
        assert_array_equal(vec_power([1.0, 0.0, 2.0], 1), [1.0, 0.0, 2.0])

    def test_fractional_power_of_negative_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            vec_power([-1.0, 1.0], 0.5)


class TestSubtensors:
    def test_principal_single_index(self, ex_nonsemipos):
        sub = principal_subtensor(ex_nonsemipos, [2])
        assert sub.dim == 1
        assert sub.entries() == [((1, 1, 1, 1), 2.0)]

    def test_principal_full_set_is_identity(self, ex_semipos):
        assert principal_subtensor(ex_semipos, [1, 2, 3]) == ex_semipos

    def test_principal_pair(self, ex_semipos):
        sub = principal_subtensor(ex_semipos, [1, 2])
        assert dict(sub.entries()) == {(1, 2, 1, 1): 1.0, (2, 2, 1, 1): 1.0}

    def test_empty_index_set_rejected(self, ex_semipos):
        with pytest.raises(ValueError, match="nonempty"):
            principal_subtensor(ex_semipos, [])

    def test_out_of_range_member_rejected(self, ex_semipos):
        with pytest.raises(ValueError, match="out of range"):
            principal_subtensor(ex_semipos, [1, 4])

    def test_row_subtensor_of_identity(self):
        row = row_subtensor(identity_tensor(4, 2), 1)
        assert row.order == 3
        assert row.entries() == [((1, 1, 1), 1.0)]

    def test_row_subtensor_fixture(self, ex_not_rowdiag):
        row = row_subtensor(ex_not_rowdiag, 3)
        assert dict(row.entries()) == {(2, 3, 2): -1.0, (3, 2, 2): 1.0, (3, 1, 3): 3.0}

    def test_row_subtensor_of_zero(self):
        assert row_subtensor(zero_tensor(4, 2), 2).nnz == 0

    def test_row_index_out_of_range(self, ex_semipos):
        with pytest.raises(ValueError, match="out of range"):
            row_subtensor(ex_semipos, 4)


class TestRowDiagonalAndMajorization:
    def test_identity_is_row_diagonal(self):
        assert is_row_diagonal(identity_tensor(4, 3))

    def test_fixture_is_not(self, ex_not_rowdiag):
        assert not is_row_diagonal(ex_not_rowdiag)

    def test_matrix_times_identity_is_row_diagonal(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert is_row_diagonal(shao_product(a, identity_tensor(4, 2)))

    def test_majorization_fixture(self, ex_nonsemipos):
        assert_array_equal(majorization(ex_nonsemipos), [[1.0, -1.0], [0.0, 2.0]])

    def test_majorization_identity(self):
        assert_array_equal(majorization(identity_tensor(5, 3)), np.eye(3))

    def test_majorization_zero(self):
        assert_array_equal(majorization(zero_tensor(3, 2)), np.zeros((2, 2)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 400).map(lambda s: np.random.default_rng(s)))
    def test_row_diagonal_iff_majorization_product(self, rng):
        # One direction via construction, the other via a random tensor.
        a = rng.integers(-3, 4, size=(2, 2)).astype(float)
        built = shao_product(a, identity_tensor(4, 2))
        assert is_row_diagonal(built)
        assert built == shao_product(majorization(built), identity_tensor(4, 2))
        m = random_tensor(rng, 4, 2)
        reconstructed = shao_product(majorization(m), identity_tensor(4, 2))
        assert is_row_diagonal(m) == (m == reconstructed)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 400).map(lambda s: np.random.default_rng(s)))
    def test_row_diagonal_contraction_law(self, rng):
        a = rng.integers(-3, 4, size=(3, 3)).astype(float)
        m = shao_product(a, identity_tensor(4, 3))
        x = rng.uniform(-2, 2, 3)
        assert_allclose(
            tv_contract(m, x), a @ vec_power(x, 3), rtol=1e-12, atol=1e-12
        )


class TestShaoProduct:
    def test_matrix_times_identity(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        got = shao_product(a, identity_tensor(4, 2))
        want = make_tensor(
            4, 2, {(1, 1, 1, 1): 1.0, (1, 2, 2, 2): 2.0, (2, 1, 1, 1): 3.0, (2, 2, 2, 2): 4.0}
        )
        assert got == want

    def test_diagonal_rescaling_fixture(self, ex_nonsemipos):
        d1 = np.diag([0.0, 3.0])
        got = shao_product(d1, ex_nonsemipos)
        assert got == make_tensor(4, 2, {(2, 1, 2, 1): -9.0, (2, 2, 2, 2): 6.0})

    def test_identity_matrix_is_neutral(self, ex_semipos):
        assert shao_product(np.eye(3), ex_semipos) == ex_semipos

    def test_order_one_operand_reduces_to_contraction(self, ex_semipos):
        u = np.array([0.5, -1.0, 2.0])
        prod = shao_product(ex_semipos, u)
        assert prod.order == 1
        assert_allclose(to_dense(prod), tv_contract(ex_semipos, u), rtol=1e-12, atol=1e-14)

    def test_dimension_mismatch(self, ex_semipos):
        with pytest.raises(ValueError, match="dimension mismatch"):
            shao_product(np.eye(2), ex_semipos)

    def test_result_order(self, ex_nonsemipos):
        prod = shao_product(ex_nonsemipos, np.eye(2))
        assert prod.order == 4
        prod2 = shao_product(np.eye(2), ex_nonsemipos)
        assert prod2.order == 4


class TestPermuteConjugate:
    def test_identity_permutation(self, ex_semipos):
        assert permute_conjugate(np.eye(3), ex_semipos) == ex_semipos

    def test_swap_fixes_identity_tensor(self):
        p = np.array([[0.0, 1.0], [1.0, 0.0]])
        ident = identity_tensor(4, 2)
        assert permute_conjugate(p, ident) == ident

    def test_rejects_non_permutation(self, ex_semipos):
        with pytest.raises(ValueError, match="permutation"):
            permute_conjugate(np.eye(3) * 2.0, ex_semipos)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 400).map(lambda s: np.random.default_rng(s)))
    def test_permutation_contraction_law(self, rng):
        m = random_tensor(rng, 4, 3)
        perm = rng.permutation(3)
        p = np.zeros((3, 3))
        p[np.arange(3), perm] = 1.0
        b = permute_conjugate(p, m)
        u = rng.uniform(-2, 2, 3)
        assert_allclose(
            tv_contract(b, u), p @ tv_contract(m, p.T @ u), rtol=1e-11, atol=1e-11
        )

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 400).map(lambda s: np.random.default_rng(s)))
    def test_positive_diagonal_preserves_signs(self, rng):
        m = random_tensor(rng, 4, 2)
        d = np.diag(rng.uniform(0.2, 3.0, 2))
        u = rng.uniform(0.0, 2.0, 2)
        vm = tv_contract(m, u)
        vdm = tv_contract(shao_product(d, m), u)
        floor = 1e-9 * (1 + np.max(np.abs(vm)))
        definite = (np.abs(vm) > floor) & (np.abs(vdm) > floor)
        assert np.all(np.sign(vm[definite]) == np.sign(vdm[definite]))


class TestAddScaleNull:
    def test_add_zero_is_neutral(self, ex_semipos):
        assert add(ex_semipos, zero_tensor(4, 3)) == ex_semipos

    def test_add_drops_cancelled_entries(self):
        a = make_tensor(2, 2, {(1, 1): 1.0})
        b = make_tensor(2, 2, {(1, 1): -1.0, (2, 2): 2.0})
        assert add(a, b) == make_tensor(2, 2, {(2, 2): 2.0})

    def test_scale_zero_gives_zero_tensor(self, ex_semipos):
        assert scale(0.0, ex_semipos) == zero_tensor(4, 3)

    def test_shape_mismatch(self, ex_semipos, ex_nonsemipos):
        with pytest.raises(ValueError, match="shape mismatch"):
            add(ex_semipos, ex_nonsemipos)

    def test_null_vector_zero(self, ex_semipos):
        assert is_null_vector(ex_semipos, [0.0, 0.0, 0.0], 0.0)

    def test_null_vector_identity_negative(self):
        assert not is_null_vector(identity_tensor(4, 2), [1.0, 0.0], 0.0)

    def test_negative_tolerance_rejected(self, ex_semipos):
        with pytest.raises(ValueError, match=">= 0"):
            is_null_vector(ex_semipos, [1.0, 1.0, 1.0], -1.0)


class TestDenseAndPredicates:
    def test_to_dense_roundtrip(self, ex_nonsemipos):
        dense = to_dense(ex_nonsemipos)
        assert dense.shape == (2, 2, 2, 2)
        assert dense[0, 0, 0, 0] == 1.0
        assert dense[1, 0, 1, 0] == -3.0

    def test_to_dense_guard(self):
        big = zero_tensor(8, 8)
        with pytest.raises(ValueError, match="exceeds limit"):
            to_dense(big)

    def test_tensor_from_matrix(self):
        a = np.array([[1.0, 0.0], [2.0, 3.0]])
        t = tensor_from_matrix(a)
        assert t.order == 2 and t.dim == 2
        assert_array_equal(majorization(t), a)

    def test_matrix_predicates(self):
        assert is_diagonal_matrix(np.diag([1.0, 2.0]))
        assert is_positive_diagonal(np.diag([1.0, 2.0]))
        assert not is_positive_diagonal(np.diag([0.0, 2.0]))
        assert is_nonnegative_diagonal(np.diag([0.0, 2.0]))
        assert not is_diagonal_matrix(np.ones((2, 2)))
        assert is_permutation_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert not is_permutation_matrix(np.ones((2, 2)))

    def test_repr(self, ex_nonsemipos):
        assert repr(ex_nonsemipos) == "Tensor(order=4, dim=2, nnz=7)"
