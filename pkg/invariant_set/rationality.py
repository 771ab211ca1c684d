"""Exact number theory behind counterfactual incompleteness.

Decisions are made with integer arithmetic only (``math.isqrt`` and reduced
``Fraction`` denominators). sympy is used solely for the 64-digit numeric
cross-check and for displaying square-free surds.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Literal, Optional, Union

import sympy as sp

from .exceptions import InvalidCosine, OffLattice
from .models import AmbientConfig, format_fraction

logger = logging.getLogger(__name__)

IRRATIONAL_SURD = "IrrationalSurd"
OFF_LATTICE = "RationalButOffLattice"
IRRATIONAL_ANGLE_TERM = "IrrationalAngleTerm"
DEGENERATE_TRIANGLE = "DegenerateTriangle"

NIVEN_VALUES = (Fraction(1), Fraction(1, 2), Fraction(0), Fraction(-1, 2), Fraction(-1))


@dataclass(frozen=True)
class RationalAngle:
    """theta = pi * m / n, stored reduced with n >= 1"""

    m: int
    n: int = 1

    def __post_init__(self):
        if self.n == 0:
            raise ValueError("Angle denominator cannot be zero")
        g = math.gcd(self.m, self.n)
        sign = -1 if self.n < 0 else 1
        object.__setattr__(self, "m", sign * self.m // g)
        object.__setattr__(self, "n", sign * self.n // g)

    @property
    def turns(self) -> Fraction:
        """theta / pi"""
        return Fraction(self.m, self.n)

    def doubled(self, times: int = 1) -> "RationalAngle":
        return RationalAngle(self.m * 2 ** times, self.n)

    def folded(self) -> Fraction:
        """theta/pi mapped into [0, 1] using cos(theta) = cos(2pi - theta)"""
        t = self.turns % 2
        return 2 - t if t > 1 else t

    def __str__(self):
        return f"pi*{self.m}/{self.n}"


class CosineClass:
    pass


@dataclass(frozen=True)
class RationalValue(CosineClass):
    value: Fraction


@dataclass(frozen=True)
class Irrational(CosineClass):
    detail: str = ""


@dataclass(frozen=True)
class Defined:
    value: Fraction


@dataclass(frozen=True)
class Undefined:
    reason: str
    detail: str = ""


@dataclass(frozen=True, eq=False)
class Surd:
    """coefficient * sqrt(radicand) with a square-free integer radicand"""

    coefficient: Fraction
    radicand: int = 1

    @classmethod
    def sqrt_of(cls, x) -> "Surd":
        x = Fraction(x)
        if x < 0:
            raise ValueError(f"Cannot take the square root of {x}")
        if x == 0:
            return cls(Fraction(0), 1)
        # sqrt(a/b) = sqrt(a*b) / b
        square, free = 1, 1
        for p, e in sp.factorint(x.numerator * x.denominator).items():
            square *= p ** (e // 2)
            if e % 2:
                free *= p
        return cls(Fraction(square, x.denominator), free)

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1 or self.coefficient == 0

    def square(self) -> Fraction:
        return self.coefficient ** 2 * self.radicand

    def scaled(self, q) -> "Surd":
        return Surd(self.coefficient * Fraction(q), self.radicand)

    def __eq__(self, other):
        if isinstance(other, Surd):
            return self.coefficient == other.coefficient and (self.radicand == other.radicand or self.coefficient == 0)
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self.coefficient == Fraction(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.coefficient, self.radicand))

    def __le__(self, other) -> bool:
        # both sides non-negative
        other = Fraction(other)
        return other >= 0 and self.square() <= other ** 2

    def __lt__(self, other) -> bool:
        other = Fraction(other)
        return other >= 0 and self.square() < other ** 2

    def __float__(self):
        return float(self.coefficient) * math.sqrt(self.radicand)

    def __str__(self):
        if self.is_rational:
            return format_fraction(self.coefficient)
        coeff = "" if self.coefficient == 1 else f"({format_fraction(self.coefficient)})"
        return f"{coeff}√{self.radicand}"


def rational_sqrt(x) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None when irrational"""
    x = Fraction(x)
    if x < 0:
        return None
    p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if p * p == x.numerator and q * q == x.denominator:
        return Fraction(p, q)
    return None


# Niven classification

def niven_classify(theta: RationalAngle) -> CosineClass:
    """Rational cosines of rational multiples of pi occur only at 0, ±1/2, ±1"""
    folded = theta.folded()
    table = {
        Fraction(0): Fraction(1),
        Fraction(1, 3): Fraction(1, 2),
        Fraction(1, 2): Fraction(0),
        Fraction(2, 3): Fraction(-1, 2),
        Fraction(1): Fraction(-1),
    }
    if folded in table:
        return RationalValue(table[folded])
    return Irrational(f"cos({theta}) is irrational (reduced denominator {folded.denominator})")


def sine_classify(theta: RationalAngle) -> CosineClass:
    """sin(theta) via cos(pi/2 - theta)"""
    return niven_classify(RationalAngle(theta.n - 2 * theta.m, 2 * theta.n))


def doubling_orbit(c, steps: int = 6) -> List[Fraction]:
    """x_k = 2cos(2^k theta) under x -> x^2 - 2, starting from x_0 = 2c"""
    x = 2 * Fraction(c)
    orbit = [x]
    for _ in range(steps):
        x = x * x - 2
        orbit.append(x)
    return orbit


def orbit_denominators_grow(c, steps: int = 6) -> bool:
    """True when the orbit refutes c as a cosine of a rational angle.

    With 2c = a/b reduced and b > 1, the next iterate has denominator b^2, so
    denominators increase without bound.
    """
    dens = [x.denominator for x in doubling_orbit(c, steps)]
    return all(later > earlier for earlier, later in zip(dens, dens[1:]))


def orbit_consistent(theta: RationalAngle, steps: int = 6) -> bool:
    """Check a rational verdict against the classification of doubled angles"""
    verdict = niven_classify(theta)
    if not isinstance(verdict, RationalValue):
        return True
    if orbit_denominators_grow(verdict.value, steps):
        return False
    for k, x in enumerate(doubling_orbit(verdict.value, steps)):
        if niven_classify(theta.doubled(k)) != RationalValue(x / 2):
            return False
    return True


def numeric_cosine(theta: RationalAngle, digits: int = 64):
    return sp.cos(sp.pi * sp.Rational(theta.m, theta.n)).evalf(digits)


def numeric_cross_check(theta: RationalAngle, digits: int = 64) -> bool:
    """The closed-form verdict agrees with a high-precision evaluation"""
    value = numeric_cosine(theta, digits)
    tolerance = sp.Rational(1, 10 ** (digits - 8))
    hits = [c for c in NIVEN_VALUES if abs(value - sp.Rational(c.numerator, c.denominator)) < tolerance]
    verdict = niven_classify(theta)
    if isinstance(verdict, RationalValue):
        return hits == [verdict.value]
    return not hits


# Pythagorean test and lattice membership

def rational_sine_partner(c) -> CosineClass:
    """With c = p/q, sin is rational iff q^2 - p^2 is a perfect square"""
    c = Fraction(c)
    if abs(c) > 1:
        raise InvalidCosine(f"|{c}| > 1")
    p, q = c.numerator, c.denominator
    rest = q * q - p * p
    r = math.isqrt(rest)
    if r * r == rest:
        return RationalValue(Fraction(r, q))
    return Irrational(f"{q}^2 - {p}^2 = {rest} is not a perfect square")


def q2_member(x, config: AmbientConfig) -> bool:
    den = (Fraction(x) % 4).denominator
    return den & (den - 1) == 0 and den <= 2 ** config.R_max


def require_lattice_cosine(name: str, c, config: AmbientConfig) -> Fraction:
    c = Fraction(c)
    if abs(c) > 1:
        raise InvalidCosine(f"{name}={c} has magnitude above 1")
    if not q2_member(c, config):
        raise OffLattice(name, format_fraction(c))
    return c


def _lattice_verdict(v: Fraction, config: AmbientConfig):
    if q2_member(v, config):
        return Defined(v)
    return Undefined(OFF_LATTICE, f"{format_fraction(v)} needs resolution finer than 2^-{config.R_max}")


def sum_cosine_defined(c1, c2, config: AmbientConfig, branch: Literal["sum", "difference"] = "sum"):
    """cos(theta ± theta') = c1*c2 ∓ sqrt((1 - c1^2)(1 - c2^2)), decided exactly"""
    c1 = require_lattice_cosine("c1", c1, config)
    c2 = require_lattice_cosine("c2", c2, config)
    product = (1 - c1 * c1) * (1 - c2 * c2)
    root = rational_sqrt(product)
    if root is None:
        return Undefined(IRRATIONAL_SURD, f"sin*sin' = {Surd.sqrt_of(product)}")
    v = c1 * c2 - root if branch == "sum" else c1 * c2 + root
    return _lattice_verdict(v, config)


def triangle_third_side(c1, c2, P: RationalAngle, config: AmbientConfig):
    """Spherical cosine rule cos θ'' = c1*c2 + sin θ sin θ' cos P"""
    if P.folded() == 1:
        return sum_cosine_defined(c1, c2, config, branch="sum")
    c1 = require_lattice_cosine("c1", c1, config)
    c2 = require_lattice_cosine("c2", c2, config)
    product = (1 - c1 * c1) * (1 - c2 * c2)
    cos_p = niven_classify(P)

    if product == 0 or cos_p == RationalValue(Fraction(0)):
        term = Fraction(0)
    elif isinstance(cos_p, Irrational):
        return Undefined(IRRATIONAL_ANGLE_TERM, cos_p.detail)
    else:
        root = rational_sqrt(product)
        if root is None:
            return Undefined(IRRATIONAL_SURD, f"sin*sin' = {Surd.sqrt_of(product)}")
        term = root * cos_p.value
    return _lattice_verdict(c1 * c2 + term, config)


def _same_sine(a: RationalAngle, b: RationalAngle) -> bool:
    ta, tb = a.turns % 2, b.turns % 2
    return ta == tb or ta == (1 - tb) % 2


def triangle_from_angles(c1, c2, P1: RationalAngle, P2: RationalAngle, P3: RationalAngle, config: AmbientConfig):
    """Cosine rule combined with the sine rule:

        cos θ'' = c1*c2 + (1 - c1^2) * sin P1 * cos P2 / sin P3

    The angle term is kept only when it collapses to a rational.
    """
    c1 = require_lattice_cosine("c1", c1, config)
    c2 = require_lattice_cosine("c2", c2, config)
    sin1, cos2, sin3 = sine_classify(P1), niven_classify(P2), sine_classify(P3)
    if sin3 == RationalValue(Fraction(0)):
        return Undefined(DEGENERATE_TRIANGLE, f"sin({P3}) = 0")

    weight = 1 - c1 * c1
    if weight == 0 or cos2 == RationalValue(Fraction(0)) or sin1 == RationalValue(Fraction(0)):
        term = Fraction(0)
    elif isinstance(cos2, Irrational):
        return Undefined(IRRATIONAL_ANGLE_TERM, cos2.detail)
    elif isinstance(sin1, RationalValue) and isinstance(sin3, RationalValue):
        term = weight * sin1.value * cos2.value / sin3.value
    elif _same_sine(P1, P3):
        term = weight * cos2.value
    else:
        return Undefined(IRRATIONAL_ANGLE_TERM, f"sin({P1})/sin({P3}) does not reduce to a rational")
    return _lattice_verdict(c1 * c2 + term, config)


# Normal-number diagnostic

def trailing_zero_bits(n: int) -> int:
    n = abs(int(n))
    return (n & -n).bit_length() - 1 if n else 0


def lattice_excess_bits(x, config: AmbientConfig) -> Optional[int]:
    """Bits of resolution beyond 2^-R_max needed by x (None when not dyadic)"""
    den = Fraction(x).denominator
    if den & (den - 1):
        return None
    return max(0, den.bit_length() - 1 - config.R_max)


def lattice_hit_rate(values: Iterable[Union[Fraction, int]], config: AmbientConfig) -> dict:
    """Share of exact values landing on the lattice, next to the 2^-N reference"""
    values = [Fraction(v) for v in values]
    hits = sum(1 for v in values if q2_member(v, config))
    excess = [lattice_excess_bits(v, config) for v in values]
    dyadic_excess = [e for e in excess if e is not None]
    return {
        "total": len(values),
        "on_lattice": hits,
        "rate": Fraction(hits, len(values)) if values else Fraction(0),
        "non_dyadic": len(values) - len(dyadic_excess),
        "max_excess_bits": max(dyadic_excess, default=0),
        "reference": Fraction(1, 2 ** config.N),
    }
