import numpy as np
import pytest
from hypothesis import given, strategies as st

from invariant_set.exceptions import DimensionMismatch, InvalidDimension
from invariant_set.sign_algebra import (
    I_UNIT,
    CoSequence,
    SignedPermOp,
    adjoint,
    apply,
    bar_replicate,
    block_matrix,
    compose,
    equals,
    is_hermitian,
    is_unitary,
    negate,
)
from tests.helpers import to_dense

DIMS = [2, 4, 8, 16]


@st.composite
def signed_perms(draw, dim=None):
    dim = dim or draw(st.sampled_from(DIMS))
    target = draw(st.permutations(list(range(dim))))
    sign = draw(st.lists(st.sampled_from([1, -1]), min_size=dim, max_size=dim))
    return SignedPermOp(target, sign)


@st.composite
def same_dim(draw, count=2):
    dim = draw(st.sampled_from(DIMS))
    return [draw(signed_perms(dim)) for _ in range(count)]


class TestConstruction:
    def test_identity_rows(self):
        op = SignedPermOp.identity(4)
        assert op.target.tolist() == [0, 1, 2, 3]
        assert op.sign.tolist() == [1, 1, 1, 1]

    def test_from_rows(self):
        assert SignedPermOp.from_rows([(1, 1), (0, -1)]) == I_UNIT

    @pytest.mark.parametrize("target, sign", [
        ([0, 0], [1, 1]),
        ([0, 1, 2], [1, 1, 1]),
        ([1, 0], [1, 0]),
        ([1, 0], [1]),
    ])
    def test_rejects_malformed(self, target, sign):
        with pytest.raises((InvalidDimension, DimensionMismatch)):
            SignedPermOp(target, sign)

    def test_arrays_are_read_only(self):
        with pytest.raises(ValueError):
            I_UNIT.sign[0] = -1

    def test_cosequence_length_power_of_two(self):
        with pytest.raises(InvalidDimension):
            CoSequence("a", [1, 1, 1])

    def test_cosequence_symbols(self):
        assert CoSequence("a", [1, -1]).symbols() == ["a", "¬a"]


class TestAlgebra:
    def test_unit_squares_to_minus_one(self):
        assert compose(I_UNIT, I_UNIT) == negate(SignedPermOp.identity(2))

    @given(same_dim())
    def test_compose_is_matrix_product(self, ops):
        A, B = ops
        assert np.array_equal(to_dense(compose(A, B)), to_dense(A) @ to_dense(B))

    @given(signed_perms(), st.data())
    def test_apply_is_matrix_vector_product(self, A, data):
        signs = data.draw(st.lists(st.sampled_from([1, -1]), min_size=A.dim, max_size=A.dim))
        out = apply(A, CoSequence("a", signs))
        assert out.signs.tolist() == (to_dense(A) @ np.array(signs)).tolist()

    @given(signed_perms())
    def test_adjoint_is_transpose(self, A):
        assert np.array_equal(to_dense(adjoint(A)), to_dense(A).T)

    @given(same_dim(), st.data())
    def test_apply_distributes_over_compose(self, ops, data):
        A, B = ops
        s = CoSequence("a", data.draw(st.lists(st.sampled_from([1, -1]), min_size=A.dim, max_size=A.dim)))
        assert apply(compose(A, B), s) == apply(A, apply(B, s))

    @given(same_dim(3))
    def test_compose_associative(self, ops):
        A, B, C = ops
        assert compose(compose(A, B), C) == compose(A, compose(B, C))

    @given(same_dim())
    def test_adjoint_reverses_products(self, ops):
        A, B = ops
        assert adjoint(compose(A, B)) == compose(adjoint(B), adjoint(A))

    @given(signed_perms())
    def test_every_signed_permutation_is_unitary(self, A):
        assert is_unitary(A)

    @given(signed_perms())
    def test_negate_is_involution(self, A):
        assert negate(negate(A)) == A
        assert not equals(negate(A), A)

    def test_compose_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            compose(I_UNIT, SignedPermOp.identity(4))

    def test_apply_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            apply(I_UNIT, CoSequence.all_plus("a", 4))


class TestHermitian:
    def test_unit_is_hermitian(self):
        assert is_hermitian(I_UNIT)

    @pytest.mark.parametrize("dim", [2, 4, 8])
    def test_identity_is_not_hermitian(self, dim):
        assert not is_hermitian(SignedPermOp.identity(dim))
        assert not is_hermitian(negate(SignedPermOp.identity(dim)))

    def test_dimension_one_is_never_hermitian(self):
        assert not is_hermitian(SignedPermOp.identity(1))


class TestReplication:
    def test_bar_replicate_blocks(self):
        op = bar_replicate(I_UNIT, 8)
        assert op.target.tolist() == [1, 0, 3, 2, 5, 4, 7, 6]
        assert op.sign.tolist() == [1, -1] * 4

    def test_bar_replicate_same_dim_is_noop(self):
        assert bar_replicate(I_UNIT, 2) is I_UNIT

    @pytest.mark.parametrize("ambient", [3, 6, 1])
    def test_bar_replicate_rejects_bad_dims(self, ambient):
        with pytest.raises(InvalidDimension):
            bar_replicate(I_UNIT, ambient)

    @given(same_dim())
    def test_bar_replicate_is_homomorphism(self, ops):
        A, B = ops
        L = 4 * A.dim
        assert bar_replicate(compose(A, B), L) == compose(bar_replicate(A, L), bar_replicate(B, L))

    def test_block_matrix_antidiagonal(self):
        one = SignedPermOp.identity(2)
        op = block_matrix([[None, one], [negate(one), None]], 2)
        assert op.target.tolist() == [2, 3, 0, 1]
        assert op.sign.tolist() == [1, 1, -1, -1]

    def test_block_matrix_needs_one_block_per_row(self):
        one = SignedPermOp.identity(2)
        with pytest.raises(InvalidDimension):
            block_matrix([[one, one], [None, one]], 2)
