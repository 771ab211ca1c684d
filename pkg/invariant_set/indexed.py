"""Indexed access mode: operator entries computed on demand from their recipe.

Used when the ambient length 2^N is too large to materialize. A recipe maps
an array of row indices to ``(targets, signs)`` without building the operator.

The R-fold root of E cycles 2^R blocks of size N. Block b sits at cycle
position bitrev_R(b), each application advances the position by one, and
wrapping from 2^R - 1 to 0 applies E. Row (b, p) of the m-th power therefore
lands in block bitrev_R((c + m) mod 2^R) at the position given by E^k, where
c = bitrev_R(b) and k = (c + m) // 2^R.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from .exceptions import DimensionMismatch, InvalidDimension
from .root_family import Q2Exponent, RootFamily, cycle_coordinate, operator_power
from .sign_algebra import CoSequence, SignedPermOp, is_power_of_two

logger = logging.getLogger(__name__)


def bit_reverse(values: np.ndarray, bits: int) -> np.ndarray:
    out = np.zeros_like(values)
    for i in range(bits):
        out |= ((values >> i) & 1) << (bits - 1 - i)
    return out


class OperatorRecipe:
    """Base class: an operator of ``dim`` whose entries are computed per row"""

    dim: int

    def entries(self, rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def materialize(self) -> SignedPermOp:
        targets, signs = self.entries(np.arange(self.dim, dtype=np.int64))
        return SignedPermOp(targets, signs, validate=False)


class DenseRecipe(OperatorRecipe):
    """Wraps an already materialized operator, replicated up to ``dim``"""

    def __init__(self, op: SignedPermOp, dim: int = None):
        self.op = op
        self.dim = dim or op.dim
        if self.dim % op.dim or not is_power_of_two(self.dim):
            raise InvalidDimension(f"Cannot replicate dim {op.dim} to {self.dim}")

    def entries(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        local = rows % self.op.dim
        return rows - local + self.op.target[local], self.op.sign[local]


class PowerRecipe(OperatorRecipe):
    """Entries of Ē_J^alpha at ambient dim 2^N without materializing it"""

    def __init__(self, family: RootFamily, J, alpha):
        config = family.config
        alpha = Q2Exponent(alpha).require(config)
        E = cycle_coordinate(family, J)
        self.dim = config.L
        self.block = config.N
        self.resolution = alpha.resolution
        self.cycle = 2 ** self.resolution
        self.steps = alpha.steps(self.resolution)
        powers = [operator_power(E, k) for k in range(4)]
        self._targets = np.stack([p.target for p in powers])
        self._signs = np.stack([p.sign for p in powers])

    def entries(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        span = self.cycle * self.block
        local = rows % span
        base = rows - local
        block, pos = np.divmod(local, self.block)
        wraps, position = np.divmod(bit_reverse(block, self.resolution) + self.steps, self.cycle)
        k = wraps % 4
        targets = base + bit_reverse(position, self.resolution) * self.block + self._targets[k, pos]
        return targets, self._signs[k, pos]


class ProductRecipe(OperatorRecipe):
    """Lazy composition factors[0]∘factors[1]∘..."""

    def __init__(self, factors: Sequence[OperatorRecipe]):
        if not factors:
            raise DimensionMismatch("ProductRecipe needs at least one factor")
        dims = {f.dim for f in factors}
        if len(dims) != 1:
            raise DimensionMismatch(f"Factors have differing dims {sorted(dims)}")
        self.factors: List[OperatorRecipe] = list(factors)
        self.dim = factors[0].dim

    def entries(self, rows):
        targets = np.asarray(rows, dtype=np.int64)
        signs = np.ones(len(targets), dtype=np.int8)
        for factor in self.factors:
            targets, s = factor.entries(targets)
            signs = signs * s
        return targets, signs


class IndexedCoSequence:
    """Recipe applied to the all-plus co-sequence, read one entry at a time"""

    def __init__(self, label: str, recipe: OperatorRecipe):
        self.label = label
        self.recipe = recipe

    @property
    def length(self) -> int:
        return self.recipe.dim

    def signs_at(self, rows) -> np.ndarray:
        _, signs = self.recipe.entries(rows)
        return signs

    def materialize(self) -> CoSequence:
        return CoSequence(self.label, self.signs_at(np.arange(self.length, dtype=np.int64)))


def sampled_equals(a: OperatorRecipe, b: OperatorRecipe, rows: np.ndarray) -> bool:
    """Entry comparison restricted to ``rows``"""
    if a.dim != b.dim:
        return False
    ta, sa = a.entries(rows)
    tb, sb = b.entries(rows)
    return bool(np.array_equal(ta, tb) and np.array_equal(sa, sb))
