from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from invariant_set.exceptions import IndexOutOfRange, UndefinedExponent
from invariant_set.models import AmbientConfig
from invariant_set.root_family import (
    CircleCoord,
    Q2Exponent,
    build_family,
    cycle_coordinate,
    operator_power,
    power,
    quaternion_triple_check,
    quaternion_triple_witness,
    root,
)
from invariant_set.sign_algebra import (
    SignedPermOp,
    adjoint,
    apply,
    bar_replicate,
    compose,
    is_hermitian,
    is_unitary,
    negate,
)
from tests.helpers import all_plus


@pytest.mark.parametrize("n_tot", [2, 3, 4])
class TestFamily:
    def test_shape(self, n_tot):
        config = AmbientConfig(n_tot=n_tot)
        family = build_family(config)
        assert len(family) == config.N - 1
        assert all(E.dim == config.N for E in family)

    def test_members_square_to_minus_one(self, n_tot):
        family = build_family(AmbientConfig(n_tot=n_tot))
        minus_one = negate(SignedPermOp.identity(family.config.N))
        assert all(compose(E, E) == minus_one for E in family)

    def test_quaternion_triples(self, n_tot):
        family = build_family(AmbientConfig(n_tot=n_tot))
        for j in range(1, family.config.M + 1):
            assert quaternion_triple_witness(family, j) == []

    def test_members_half_plus_and_skew(self, n_tot):
        family = build_family(AmbientConfig(n_tot=n_tot))
        for E in family:
            assert int((E.sign > 0).sum()) == E.dim // 2
            assert adjoint(E) == negate(E)
            assert is_unitary(E)
            assert is_hermitian(E)


def test_smallest_triple_multiplies(family2):
    assert compose(family2[1], family2[2]) == family2[3]


def test_triple_index_range(family3):
    with pytest.raises(IndexOutOfRange):
        quaternion_triple_check(family3, 4)


def test_family_index_range(family3):
    with pytest.raises(IndexOutOfRange):
        family3[0]


def test_sign_fault_breaks_triple(family2):
    last = family2.last
    sign = last.sign.copy()
    sign[0] = -sign[0]
    broken = family2.with_member(3, SignedPermOp(last.target, sign, validate=False))
    witness = quaternion_triple_witness(broken, 1)
    assert witness
    assert any("row" in w for w in witness)


class TestCycle:
    def test_second_half_is_negated(self, family3):
        M = family3.config.M
        for J in range(1, 2 * M + 1):
            assert cycle_coordinate(family3, J + 2 * M) == negate(cycle_coordinate(family3, J))

    def test_coordinate_range(self, family3):
        with pytest.raises(IndexOutOfRange):
            cycle_coordinate(family3, 4 * family3.config.M + 1)

    @pytest.mark.parametrize("n_tot", [2, 3, 4])
    def test_quarter_turn_is_last_member_premultiplied(self, n_tot):
        family = build_family(AmbientConfig(n_tot=n_tot))
        config = family.config
        for J in range(1, 4 * config.M + 1):
            turned = CircleCoord(J).quarter_turn(config)
            assert cycle_coordinate(family, turned) == compose(family.last, cycle_coordinate(family, J))


class TestExponent:
    @pytest.mark.parametrize("raw, expected", [
        (5, Fraction(1)),
        ("-1/2", Fraction(7, 2)),
        (Fraction(9, 4), Fraction(9, 4)),
        (4, Fraction(0)),
    ])
    def test_reduced_mod_four(self, raw, expected):
        assert Q2Exponent(raw).value == expected

    def test_non_dyadic_rejected(self):
        with pytest.raises(UndefinedExponent):
            Q2Exponent(Fraction(1, 3))

    def test_resolution_limit(self, config3):
        assert Q2Exponent(Fraction(1, 32)).on_lattice(config3)
        with pytest.raises(UndefinedExponent):
            Q2Exponent(Fraction(1, 64)).require(config3)

    @pytest.mark.parametrize("n_tot", [2, 3, 4])
    def test_lattice_size(self, n_tot):
        config = AmbientConfig(n_tot=n_tot)
        lattice = Q2Exponent.lattice(config)
        assert len(lattice) == config.lattice_size == 2 ** (config.N - n_tot + 2)
        assert len(set(lattice)) == len(lattice)

    def test_arithmetic_wraps(self):
        assert Q2Exponent(3) + Q2Exponent(Fraction(3, 2)) == Fraction(1, 2)
        assert Q2Exponent(0) - Q2Exponent(Fraction(1, 4)) == Fraction(15, 4)


class TestPower:
    def test_root_squares_to_block_diagonal(self, family2):
        E = family2[1]
        assert compose(root(E), root(E)) == bar_replicate(E, 2 * E.dim)

    def test_operator_power_matches_repeated_compose(self, family3):
        B = root(root(family3[2]))
        expected = SignedPermOp.identity(B.dim)
        for m in range(9):
            assert operator_power(B, m) == expected
            expected = compose(expected, B)

    @pytest.mark.parametrize("J", [1, 3, 7, 12])
    def test_integer_powers(self, family3, J):
        L = family3.config.L
        assert power(family3, J, 0) == SignedPermOp.identity(L)
        assert power(family3, J, 1) == bar_replicate(cycle_coordinate(family3, J), L)
        assert power(family3, J, 2) == negate(SignedPermOp.identity(L))

    def test_quarter_root_frequency(self, family3, config3):
        s = apply(power(family3, 1, Fraction(1, 4)), all_plus(config3))
        assert Fraction(int((s.signs > 0).sum()), s.length) == Fraction(7, 8)

    @pytest.mark.parametrize("n_tot", [2, 3])
    def test_half_roots_compose(self, n_tot):
        family = build_family(AmbientConfig(n_tot=n_tot))
        half = power(family, 1, Fraction(1, 2))
        assert compose(half, half) == power(family, 1, 1)

    def test_off_lattice_power(self, family2):
        with pytest.raises(UndefinedExponent):
            power(family2, 1, Fraction(1, 8))

    @pytest.mark.parametrize("n_tot", [2, 3])
    def test_frequency_law_exhaustive(self, n_tot):
        family = build_family(AmbientConfig(n_tot=n_tot))
        config = family.config
        base = all_plus(config)
        for J in range(1, 4 * config.M + 1):
            for alpha in Q2Exponent.lattice(config):
                s = apply(power(family, J, alpha), base)
                assert Fraction(int((s.signs > 0).sum()), s.length) == abs(1 - alpha.value / 2)

    def test_hermitian_only_at_odd_integers(self, family2, config2):
        for alpha in Q2Exponent.lattice(config2):
            op = power(family2, 1, alpha)
            assert is_unitary(op)
            assert is_hermitian(op) == (alpha.value in (1, 3))

    def test_additivity_exhaustive(self, family2, config2):
        lattice = Q2Exponent.lattice(config2)
        for J in range(1, 4 * config2.M + 1):
            ops = {a: power(family2, J, a) for a in lattice}
            for a in lattice:
                for b in lattice:
                    assert compose(ops[a], ops[b]) == ops[a + b]

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 127), st.integers(0, 127))
    def test_additivity_sampled(self, powers3, J, a, b):
        alpha, beta = Fraction(a, 32), Fraction(b, 32)
        assert compose(powers3(J, alpha), powers3(J, beta)) == powers3(J, alpha + beta)

    @pytest.mark.slow
    def test_additivity_every_coordinate(self, powers3, config3):
        lattice = Q2Exponent.lattice(config3)
        for J in range(1, 4 * config3.M + 1):
            for a in lattice:
                for b in lattice:
                    assert compose(powers3(J, a), powers3(J, b)) == powers3(J, a + b), f"J={J}, alpha={a}, beta={b}"

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 28), st.integers(0, 16383), st.integers(0, 16383))
    def test_additivity_finest_lattice(self, family4, J, a, b):
        alpha, beta = Fraction(a, 4096), Fraction(b, 4096)
        lhs = compose(power(family4, J, alpha), power(family4, J, beta))
        assert lhs == power(family4, J, alpha + beta)


def test_identity_member_breaks_triple(family3):
    broken = family3.with_member(2, SignedPermOp.identity(8))
    assert not quaternion_triple_check(broken, 2)
    assert quaternion_triple_check(broken, 1)
