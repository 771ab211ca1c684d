"""Chart between lbit parameters (alpha, J) and directions (theta, phi).

    cos^2(theta/2) = |1 - alpha/2|,   alpha = 1 - cos(theta)  for theta in [0, pi]
                                      alpha = 3 + cos(theta)  for theta in [pi, 2pi]
    phi = (pi/2) * J / M

Directions keep cos(theta) as an exact rational; theta itself is never formed.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exceptions import InvalidCosine, NonRepresentablePhi, OffLattice
from .models import AmbientConfig, format_fraction
from .rationality import RationalAngle, q2_member
from .root_family import CircleCoord, Q2Exponent, as_coord


@dataclass(frozen=True)
class Direction:
    cos_theta: Fraction
    phi: RationalAngle
    lower_branch: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cos_theta", Fraction(self.cos_theta))
        if abs(self.cos_theta) > 1:
            raise InvalidCosine(f"cos(theta)={self.cos_theta} has magnitude above 1")

    @property
    def cos_sq_half(self) -> Fraction:
        """cos^2(theta/2), the plus-symbol frequency"""
        return (1 + self.cos_theta) / 2


def alpha_from_direction(d: Direction, config: AmbientConfig) -> Q2Exponent:
    if not q2_member(d.cos_theta, config):
        raise OffLattice("cos_theta", format_fraction(d.cos_theta))
    alpha = 3 + d.cos_theta if d.lower_branch else 1 - d.cos_theta
    return Q2Exponent(alpha).require(config)


def J_from_phi(phi: Union[RationalAngle, float], config: AmbientConfig) -> CircleCoord:
    if not isinstance(phi, RationalAngle):
        raise NonRepresentablePhi(f"phi={phi!r} is not a rational multiple of pi")
    J = (phi.turns % 2) * 2 * config.M
    if J.denominator != 1:
        raise NonRepresentablePhi(f"phi={phi} gives J={J}, not an integer")
    # phi = 0 is the J = 4M pole
    return CircleCoord(int(J) or 4 * config.M)


def direction_from_lbit(alpha, J: Union[int, CircleCoord], config: AmbientConfig) -> Direction:
    alpha = Q2Exponent(alpha).require(config)
    J = as_coord(J).validate(config)
    phi = RationalAngle(J.J, 2 * config.M)
    if alpha.value <= 2:
        return Direction(1 - alpha.value, phi)
    return Direction(alpha.value - 3, phi, lower_branch=True)


def plus_frequency(alpha) -> Fraction:
    """|1 - alpha/2|"""
    return abs(1 - Q2Exponent(alpha).value / 2)


def ket_correspondence(alpha, J: Union[int, CircleCoord], config: AmbientConfig, label: str = "a") -> str:
    """The '∼' Hilbert-space reading of Ē_J^alpha|a), as display text only"""
    f = plus_frequency(alpha)
    J = as_coord(J).validate(config)
    phase = RationalAngle(J.J, 2 * config.M)
    return (
        f"√({format_fraction(f)})|{label}⟩ + e^(iπ·{format_fraction(phase.turns)})"
        f"√({format_fraction(1 - f)})|¬{label}⟩"
    )
