"""Self-similar family of square roots of minus one and their dyadic powers.

Level 1 is the single 2x2 operator ``i``. Level k+1 maps each level-k member
E_j to diag(E_j, -E_j), then to antidiag(E_j, E_j), and appends
[[0, -1], [1, 0]]. At N = 2^n_tot this yields N-1 members of dim N.

Verified convention, for 1 <= j <= M:
    E[j]∘E[j+M] == E[N-1]
    E[N-1]∘E[j] == E[j+M]
    E[N-1]∘E[j+M] == -E[j]
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Union

from .exceptions import IndexOutOfRange, UndefinedExponent
from .models import AmbientConfig
from .sign_algebra import (
    I_UNIT,
    SignedPermOp,
    bar_replicate,
    block_matrix,
    compose,
    negate,
)

logger = logging.getLogger(__name__)


class Q2Exponent:
    """Dyadic exponent alpha = k / 2^R, reduced and taken mod 4"""

    __slots__ = ("value",)

    def __init__(self, value: Union[int, str, Fraction, "Q2Exponent"]):
        if isinstance(value, Q2Exponent):
            value = value.value
        value = Fraction(value) % 4
        den = value.denominator
        if den & (den - 1):
            raise UndefinedExponent(f"Exponent {value} is not a dyadic rational")
        self.value = value

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def resolution(self) -> int:
        return self.value.denominator.bit_length() - 1

    def on_lattice(self, config: AmbientConfig) -> bool:
        return self.resolution <= config.R_max

    def require(self, config: AmbientConfig) -> "Q2Exponent":
        if not self.on_lattice(config):
            raise UndefinedExponent(
                f"Exponent {self} needs resolution 2^-{self.resolution}, finest available is 2^-{config.R_max}"
            )
        return self

    def steps(self, resolution: int) -> int:
        """Numerator of alpha written over 2^resolution"""
        return int(self.value * 2 ** resolution)

    @classmethod
    def lattice(cls, config: AmbientConfig) -> List["Q2Exponent"]:
        scale = 2 ** config.R_max
        return [cls(Fraction(k, scale)) for k in range(4 * scale)]

    def __add__(self, other) -> "Q2Exponent":
        return Q2Exponent(self.value + Q2Exponent(other).value)

    def __sub__(self, other) -> "Q2Exponent":
        return Q2Exponent(self.value - Q2Exponent(other).value)

    def __eq__(self, other):
        if isinstance(other, Q2Exponent):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == Fraction(other) % 4
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __str__(self):
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

    def __repr__(self):
        return f"Q2Exponent({self})"


@dataclass(frozen=True)
class CircleCoord:
    """Discrete azimuth 1 <= J <= 4M"""

    J: int

    def validate(self, config: AmbientConfig) -> "CircleCoord":
        if not 1 <= self.J <= 4 * config.M:
            raise IndexOutOfRange(f"J={self.J} outside 1..{4 * config.M}")
        return self

    def quarter_turn(self, config: AmbientConfig) -> "CircleCoord":
        """J + M mod 4M, the coordinate of E[N-1] pre-multiplied onto E_J"""
        period = 4 * config.M
        return CircleCoord((self.J + config.M - 1) % period + 1)


def as_coord(J: Union[int, CircleCoord]) -> CircleCoord:
    return J if isinstance(J, CircleCoord) else CircleCoord(int(J))


class RootFamily:
    """Members E[1..N-1], each of dim N, for one universe configuration"""

    def __init__(self, config: AmbientConfig, members: List[SignedPermOp]):
        self.config = config
        self._members = tuple(members)

    def __getitem__(self, j: int) -> SignedPermOp:
        if not 1 <= j <= len(self._members):
            raise IndexOutOfRange(f"Family index {j} outside 1..{len(self._members)}")
        return self._members[j - 1]

    def __len__(self):
        return len(self._members)

    def __iter__(self):
        return iter(self._members)

    @property
    def last(self) -> SignedPermOp:
        return self._members[-1]

    def with_member(self, j: int, op: SignedPermOp) -> "RootFamily":
        """Copy with member j replaced (used by mutation checks)"""
        members = list(self._members)
        members[j - 1] = op
        return RootFamily(self.config, members)


def _next_level(members: List[SignedPermOp]) -> List[SignedPermOp]:
    d = members[0].dim
    identity = SignedPermOp.identity(d)
    lower = [block_matrix([[E, None], [None, negate(E)]], d) for E in members]
    upper = [block_matrix([[None, E], [E, None]], d) for E in members]
    last = block_matrix([[None, negate(identity)], [identity, None]], d)
    return lower + upper + [last]


def build_family(config: AmbientConfig) -> RootFamily:
    members = [I_UNIT]
    for _ in range(config.n_tot - 1):
        members = _next_level(members)
    logger.debug(f"Built root family: {len(members)} members of dim {config.N}")
    return RootFamily(config, members)


def quaternion_triple_witness(f: RootFamily, j: int) -> List[str]:
    """Relations of the j-th triple that fail, each with its first bad row"""
    M = f.config.M
    if not 1 <= j <= M:
        raise IndexOutOfRange(f"Triple index {j} outside 1..{M}")
    Ej, EjM, Elast = f[j], f[j + M], f.last
    minus_one = negate(SignedPermOp.identity(Ej.dim))
    relations = {
        f"E[{j}]^2 == -1": (compose(Ej, Ej), minus_one),
        f"E[{j + M}]^2 == -1": (compose(EjM, EjM), minus_one),
        f"E[{len(f)}]^2 == -1": (compose(Elast, Elast), minus_one),
        f"E[{j}]∘E[{j + M}] == E[{len(f)}]": (compose(Ej, EjM), Elast),
        f"E[{len(f)}]∘E[{j}] == E[{j + M}]": (compose(Elast, Ej), EjM),
        f"E[{len(f)}]∘E[{j + M}] == -E[{j}]": (compose(Elast, EjM), negate(Ej)),
    }
    failures = []
    for name, (lhs, rhs) in relations.items():
        row = lhs.first_difference(rhs)
        if row is not None:
            failures.append(f"{name} fails at row {row}")
    return failures


def quaternion_triple_check(f: RootFamily, j: int) -> bool:
    return not quaternion_triple_witness(f, j)


def cycle_coordinate(f: RootFamily, J: Union[int, CircleCoord]) -> SignedPermOp:
    """E_J extended around the circle: E_{J+2M} = -E_J, period 4M"""
    J = as_coord(J).validate(f.config).J
    M2 = 2 * f.config.M
    return f[J] if J <= M2 else negate(f[J - M2])


def root(A: SignedPermOp) -> SignedPermOp:
    """[[0, I], [A, 0]] at twice the dimension; its square is diag(A, A)"""
    return block_matrix([[None, SignedPermOp.identity(A.dim)], [A, None]], A.dim)


def operator_power(A: SignedPermOp, m: int) -> SignedPermOp:
    """A^m by binary exponentiation"""
    result = SignedPermOp.identity(A.dim)
    base = A
    while m:
        if m & 1:
            result = compose(result, base)
        m >>= 1
        if m:
            base = compose(base, base)
    return result


def power(f: RootFamily, J: Union[int, CircleCoord], alpha) -> SignedPermOp:
    """Ambient operator Ē_J^alpha.

    With alpha = m / 2^R, the R-fold root of E_J is raised to the m-th power
    and bar-replicated to dim 2^N. Raising before replicating gives the same
    operator since replication is a homomorphism.
    """
    alpha = Q2Exponent(alpha).require(f.config)
    E = cycle_coordinate(f, J)
    R = alpha.resolution
    B = E
    for _ in range(R):
        B = root(B)
    return bar_replicate(operator_power(B, alpha.steps(R)), f.config.L)


class PowerCache:
    """Memo of ambient powers for repeated lookups within one run"""

    def __init__(self, family: RootFamily):
        self.family = family
        self._cache: Dict[tuple, SignedPermOp] = {}

    def __call__(self, J, alpha) -> SignedPermOp:
        key = (as_coord(J).J, Q2Exponent(alpha))
        if key not in self._cache:
            self._cache[key] = power(self.family, *key)
        return self._cache[key]
