from fractions import Fraction

import numpy as np
import pytest

from invariant_set.celestial import (
    Direction,
    J_from_phi,
    alpha_from_direction,
    direction_from_lbit,
    ket_correspondence,
    plus_frequency,
)
from invariant_set.exceptions import InvalidCosine, NonRepresentablePhi, OffLattice
from invariant_set.rationality import RationalAngle, q2_member
from invariant_set.root_family import CircleCoord, Q2Exponent


def test_equator_at_alpha_one(config3):
    d = direction_from_lbit(1, config3.M, config3)
    assert d.cos_theta == 0
    assert d.phi.turns == Fraction(1, 2)
    assert not d.lower_branch


@pytest.mark.parametrize("alpha, cos_theta, lower", [
    (0, Fraction(1), False),
    (Fraction(1, 4), Fraction(3, 4), False),
    (2, Fraction(-1), False),
    (3, Fraction(0), True),
    (Fraction(7, 2), Fraction(1, 2), True),
])
def test_directions(config3, alpha, cos_theta, lower):
    d = direction_from_lbit(alpha, 1, config3)
    assert (d.cos_theta, d.lower_branch) == (cos_theta, lower)
    assert d.cos_sq_half == plus_frequency(alpha)


def test_round_trip_exhaustive(config2):
    for alpha in Q2Exponent.lattice(config2):
        for J in range(1, 4 * config2.M + 1):
            d = direction_from_lbit(alpha, J, config2)
            assert q2_member(d.cos_theta, config2)
            assert alpha_from_direction(d, config2) == alpha
            assert J_from_phi(d.phi, config2) == CircleCoord(J)


@pytest.mark.parametrize("alpha, J", [
    (Fraction(1, 4096), 1),
    (Fraction(4095, 4096), 14),
    (Fraction(9, 4), 28),
    (Fraction(16383, 4096), 7),
])
def test_round_trip_sampled(config4, alpha, J):
    d = direction_from_lbit(alpha, J, config4)
    assert alpha_from_direction(d, config4) == alpha
    assert J_from_phi(d.phi, config4).J == J


def test_round_trip_seeded_finest_lattice(config4):
    rng = np.random.default_rng(2024)
    ks = rng.integers(0, 4 * 4096, size=10_000)
    Js = rng.integers(1, 4 * config4.M + 1, size=10_000)
    for k, J in zip(ks.tolist(), Js.tolist()):
        alpha = Fraction(k, 4096)
        d = direction_from_lbit(alpha, J, config4)
        assert alpha_from_direction(d, config4) == alpha, f"alpha={alpha}, J={J}"
        assert J_from_phi(d.phi, config4).J == J, f"alpha={alpha}, J={J}"


def test_pole_maps_to_last_coordinate(config3):
    assert J_from_phi(RationalAngle(0), config3) == CircleCoord(12)
    assert J_from_phi(RationalAngle(2), config3) == CircleCoord(12)


def test_off_lattice_cosine(config3):
    with pytest.raises(OffLattice):
        alpha_from_direction(Direction(Fraction(1, 3), RationalAngle(1, 2)), config3)
    with pytest.raises(OffLattice):
        alpha_from_direction(Direction(Fraction(1, 64), RationalAngle(1, 2)), config3)


def test_non_representable_phi(config3):
    with pytest.raises(NonRepresentablePhi):
        J_from_phi(0.5, config3)
    with pytest.raises(NonRepresentablePhi):
        J_from_phi(RationalAngle(1, 5), config3)


def test_cosine_magnitude():
    with pytest.raises(InvalidCosine):
        Direction(Fraction(3, 2), RationalAngle(1, 2))


def test_ket_correspondence(config2):
    assert ket_correspondence(1, 1, config2) == "√(1/2)|a⟩ + e^(iπ·1/2)√(1/2)|¬a⟩"
    assert ket_correspondence(Fraction(1, 2), 4, config2, label="b") == "√(3/4)|b⟩ + e^(iπ·2)√(1/4)|¬b⟩"
