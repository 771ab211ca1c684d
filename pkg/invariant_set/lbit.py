"""n-lbits: label co-sequences generated by arrays of fractional root powers.

Row ``x`` of an n-lbit lists 2^(n-1) parameter indices; its co-sequence is
the product of the corresponding powers, in written order (rightmost factor
applied first), acting on the all-plus base.
"""

import logging
import string
from itertools import combinations
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, validator

from . import settings
from .exceptions import InvalidAssignment
from .indexed import IndexedCoSequence, PowerRecipe, ProductRecipe
from .models import AmbientConfig
from .root_family import CircleCoord, PowerCache, Q2Exponent, RootFamily, as_coord
from .sign_algebra import CoSequence, apply

logger = logging.getLogger(__name__)

EXPLICIT_ASSIGNMENTS: Dict[int, List[List[int]]] = {
    1: [[1]],
    2: [[1, 3],
        [2, 3]],
    3: [[1, 3, 5, 7],
        [2, 3, 6, 7],
        [2, 4, 5, 7]],
    4: [[1, 3, 5, 7, 9, 11, 13, 15],
        [2, 3, 6, 7, 9, 12, 14, 15],
        [2, 4, 5, 7, 10, 11, 14, 15],
        [1, 4, 6, 8, 9, 11, 14, 15]],
}


def _ansatz_groups(n: int) -> List[frozenset]:
    """Column bipartitions, each given by the group holding row 0"""
    if n == 1:
        return [frozenset({0})]
    new_row = n - 1
    rows = frozenset(range(new_row))
    columns = []
    for group in _ansatz_groups(n - 1):
        other = rows - group
        # new row joins the smaller group; ties go to the group without row 0
        if other and len(group) < len(other):
            group = group | {new_row}
        columns.append(group)

    everyone = frozenset(range(n))

    def minority(group):
        rest = everyone - group
        return group if len(group) < len(rest) else rest

    used = set(columns)
    remaining = [
        frozenset({0}) | frozenset(extra)
        for size in range(n)
        for extra in combinations(range(1, n), size)
    ]
    remaining = [g for g in remaining if g not in used]
    remaining.sort(key=lambda g: (len(minority(g)), tuple(sorted(minority(g)))), reverse=True)
    return columns + remaining


def ansatz_assignment(n: int) -> List[List[int]]:
    """Row-by-row parameter indices; column k uses 2k-1 for row a's group, 2k otherwise"""
    if n < 1:
        raise InvalidAssignment(f"An lbit needs at least one label, got n={n}")
    groups = _ansatz_groups(n)
    return [
        [2 * k - 1 if row in group else 2 * k for k, group in enumerate(groups, start=1)]
        for row in range(n)
    ]


def assignment_for(n: int) -> List[List[int]]:
    return EXPLICIT_ASSIGNMENTS[n] if n in EXPLICIT_ASSIGNMENTS else ansatz_assignment(n)


def labels_for(n: int) -> List[str]:
    return list(string.ascii_lowercase[:n])


class LbitConfig(BaseModel):
    """Parameters {(J_i, alpha_i)}, i = 1..2^n - 1, of an n-lbit"""

    n: int = Field(..., ge=1, le=8, description="Number of labels")
    params: List[Tuple[Any, Any]] = Field(..., description="(CircleCoord, Q2Exponent) pairs, 1-indexed")
    ambient: AmbientConfig = Field(default_factory=AmbientConfig)
    assignment: Optional[List[List[int]]] = None

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @validator('params', pre=True)
    def coerce_params(cls, v):
        return [(as_coord(J), Q2Exponent(alpha)) for J, alpha in v]

    @validator('params')
    def validate_param_count(cls, v, values):
        n = values.get('n')
        if n is not None and len(v) != 2 ** n - 1:
            raise ValueError(f'A {n}-lbit needs {2 ** n - 1} parameter pairs, got {len(v)}')
        return v

    @validator('assignment', always=True)
    def validate_assignment(cls, v, values):
        n = values.get('n')
        if n is None:
            return v
        v = v or assignment_for(n)
        if len(v) != n or any(len(row) != 2 ** (n - 1) for row in v):
            raise ValueError(f'Assignment must have {n} rows of {2 ** (n - 1)} indices')
        if any(not 1 <= idx <= 2 ** n - 1 for row in v for idx in row):
            raise ValueError('Assignment references a parameter index out of range')
        return v

    @property
    def free_parameters(self) -> int:
        return 2 * len(self.params)

    @property
    def labels(self) -> List[str]:
        return labels_for(self.n)


class LbitState:
    """One co-sequence per label, materialized or indexed"""

    def __init__(self, config: LbitConfig, cosequences: Dict[str, Union[CoSequence, IndexedCoSequence]]):
        self.config = config
        self.cosequences = cosequences

    def __getitem__(self, label: str):
        return self.cosequences[label]

    @property
    def labels(self) -> List[str]:
        return list(self.cosequences)

    @property
    def indexed(self) -> bool:
        return any(isinstance(s, IndexedCoSequence) for s in self.cosequences.values())


def build_lbit(
    config: LbitConfig,
    family: RootFamily,
    indexed: Optional[bool] = None,
    powers: Optional[PowerCache] = None,
) -> LbitState:
    ambient = family.config
    if config.ambient != ambient:
        raise InvalidAssignment(f"Lbit universe n_tot={config.ambient.n_tot} differs from family n_tot={ambient.n_tot}")
    for J, alpha in config.params:
        J.validate(ambient)
        alpha.require(ambient)
    if config.free_parameters != 2 ** (config.n + 1) - 2:
        raise InvalidAssignment(f"{config.free_parameters} free parameters for a {config.n}-lbit")

    if indexed is None:
        indexed = ambient.N > settings.MATERIALIZE_MAX_N

    cosequences = {}
    if indexed:
        for label, row in zip(config.labels, config.assignment):
            factors = [PowerRecipe(family, *config.params[i - 1]) for i in row]
            cosequences[label] = IndexedCoSequence(label, ProductRecipe(factors))
    else:
        powers = powers or PowerCache(family)
        for label, row in zip(config.labels, config.assignment):
            s = CoSequence.all_plus(label, ambient.L)
            for i in reversed(row):
                s = apply(powers(*config.params[i - 1]), s)
            cosequences[label] = s
    logger.debug(f"Built {config.n}-lbit at n_tot={ambient.n_tot} ({'indexed' if indexed else 'materialized'})")
    return LbitState(config, cosequences)


def predicted_agreement(alpha1, alpha2) -> Fraction:
    """|1 - ((alpha2 - alpha1) mod 4)/2|"""
    delta = Q2Exponent(alpha2) - Q2Exponent(alpha1)
    return abs(1 - delta.value / 2)


def shared_factor_commutes(J1, J3, alpha3) -> bool:
    """Whether Ē_J3^alpha3 commutes with every power of E_J1.

    True for J3 == J1, or when alpha3 is 0 or 2 (the identity or its negation).
    Only then does pair agreement reduce to |1 - (alpha2 - alpha1)/2|.
    """
    return as_coord(J3).J == as_coord(J1).J or Q2Exponent(alpha3).value in (0, 2)


def entangle_pair(alpha1, alpha2, alpha3, J1, J3, family: RootFamily, indexed: Optional[bool] = None, powers: Optional[PowerCache] = None) -> LbitState:
    """2-lbit with J2 = J1"""
    J1 = as_coord(J1)
    config = LbitConfig(n=2, params=[(J1, alpha1), (J1, alpha2), (J3, alpha3)], ambient=family.config)
    return build_lbit(config, family, indexed=indexed, powers=powers)


def ghz_betas(alphas: Sequence) -> Tuple[Q2Exponent, Q2Exponent, Q2Exponent]:
    a = [Q2Exponent(x) for x in alphas]
    return a[0] + a[2] + a[4], a[1] + a[2] + a[5], a[1] + a[3] + a[4]


def decompose_betas(beta1, beta2, beta3) -> List[Q2Exponent]:
    """Canonical alpha_1..alpha_6 with the given beta sums (alpha_7 left to the caller)"""
    b1, b2, b3 = Q2Exponent(beta1), Q2Exponent(beta2), Q2Exponent(beta3)
    zero = Q2Exponent(0)
    return [b1, b2, zero, b3 - b2, zero, zero]


def ghz_triple(alphas: Sequence, J1, J7, family: RootFamily, indexed: Optional[bool] = None, powers: Optional[PowerCache] = None) -> LbitState:
    """3-lbit with J1 shared by the first six operators; alphas lists alpha_1..alpha_7"""
    if len(alphas) != 7:
        raise InvalidAssignment(f"A GHZ triple needs 7 exponents, got {len(alphas)}")
    J1 = as_coord(J1)
    params = [(J1, alpha) for alpha in alphas[:6]] + [(J7, alphas[6])]
    config = LbitConfig(n=3, params=params, ambient=family.config)
    return build_lbit(config, family, indexed=indexed, powers=powers)


def epr_counterexamples(
    family: RootFamily,
    J1,
    J3,
    alpha3,
    alphas: Optional[Sequence] = None,
    powers: Optional[PowerCache] = None,
    limit: int = 5,
) -> Tuple[int, int, List[str]]:
    """Exact-count scan of entangled-pair agreement against |1 - (alpha2 - alpha1)/2|.

    Every (alpha1, alpha2) pair drawn from ``alphas`` (default: the whole
    lattice) is counted. Returns (pairs checked, failures, first witnesses).
    """
    powers = powers or PowerCache(family)
    alphas = [Q2Exponent(a) for a in (alphas if alphas is not None else Q2Exponent.lattice(family.config))]
    base = apply(powers(J3, alpha3), CoSequence.all_plus("a", family.config.L))
    rows = {a: apply(powers(J1, a), base).signs for a in alphas}
    length = family.config.L
    checked, failures, witnesses = 0, 0, []
    for a1 in alphas:
        for a2 in alphas:
            checked += 1
            measured = Fraction(int((rows[a1] == rows[a2]).sum()), length)
            expected = predicted_agreement(a1, a2)
            if measured != expected:
                failures += 1
                if len(witnesses) < limit:
                    witnesses.append(f"alpha1={a1}, alpha2={a2}: counted {measured}, expected {expected}")
    logger.debug(f"EPR scan J1={as_coord(J1).J}, J3={as_coord(J3).J}, alpha3={alpha3}: {failures}/{checked} failures")
    return checked, failures, witnesses
