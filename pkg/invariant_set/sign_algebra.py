"""Signed-permutation operators acting on co-sequences of signed symbols.

An operator of dimension ``dim`` has exactly one non-zero entry per row and
column. Row ``r`` stores the column of that entry in ``target[r]`` and its
value (+1 for the identity symbol, -1 for negation) in ``sign[r]``. Dense
matrices are never formed.
"""

import logging
from typing import Iterable, Optional

import numpy as np

from .exceptions import DimensionMismatch, InvalidDimension

logger = logging.getLogger(__name__)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class SignedPermOp:
    """Immutable signed permutation operator"""

    __slots__ = ("target", "sign")

    def __init__(self, target: Iterable[int], sign: Iterable[int], validate: bool = True):
        self.target = _frozen(target, np.int64)
        self.sign = _frozen(sign, np.int8)
        if validate:
            self._validate()

    def _validate(self):
        dim = len(self.target)
        if len(self.sign) != dim:
            raise DimensionMismatch(f"target has {dim} rows but sign has {len(self.sign)}")
        if not is_power_of_two(dim):
            raise InvalidDimension(f"Operator dimension {dim} is not a power of two")
        if not np.array_equal(np.sort(self.target), np.arange(dim)):
            raise InvalidDimension("target is not a bijection (need one non-zero per row and column)")
        if not np.all(np.abs(self.sign) == 1):
            raise InvalidDimension("sign entries must be +1 or -1")

    @property
    def dim(self) -> int:
        return len(self.target)

    @classmethod
    def identity(cls, dim: int) -> "SignedPermOp":
        return cls(np.arange(dim), np.ones(dim, dtype=np.int8))

    @classmethod
    def from_rows(cls, rows) -> "SignedPermOp":
        """Build from ``[(column, sign), ...]`` listed row by row"""
        rows = list(rows)
        return cls([c for c, _ in rows], [s for _, s in rows])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedPermOp):
            return NotImplemented
        return equals(self, other)

    def __hash__(self):
        return hash((self.target.tobytes(), self.sign.tobytes()))

    def __neg__(self) -> "SignedPermOp":
        return negate(self)

    def __matmul__(self, other: "SignedPermOp") -> "SignedPermOp":
        return compose(self, other)

    def __repr__(self):
        if self.dim > 16:
            return f"SignedPermOp(dim={self.dim})"
        rows = ", ".join(f"{'' if s > 0 else '¬'}{t}" for t, s in zip(self.target, self.sign))
        return f"SignedPermOp([{rows}])"

    def first_difference(self, other: "SignedPermOp") -> Optional[int]:
        """Row index of the first disagreement with ``other`` (None when equal)"""
        if self.dim != other.dim:
            return 0
        diff = np.flatnonzero((self.target != other.target) | (self.sign != other.sign))
        return int(diff[0]) if diff.size else None


class CoSequence:
    """Column of signed symbols: +1 stands for ``label``, -1 for ``¬label``"""

    __slots__ = ("label", "signs")

    def __init__(self, label: str, signs: Iterable[int]):
        self.label = label
        self.signs = _frozen(signs, np.int8)
        if not is_power_of_two(len(self.signs)):
            raise InvalidDimension(f"Co-sequence length {len(self.signs)} is not a power of two")

    @property
    def length(self) -> int:
        return len(self.signs)

    @classmethod
    def all_plus(cls, label: str, length: int) -> "CoSequence":
        return cls(label, np.ones(length, dtype=np.int8))

    def symbols(self):
        return [self.label if s > 0 else f"¬{self.label}" for s in self.signs]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoSequence):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.signs, other.signs)

    def __hash__(self):
        return hash((self.label, self.signs.tobytes()))

    def __repr__(self):
        if self.length > 16:
            return f"CoSequence({self.label!r}, length={self.length})"
        return f"CoSequence({', '.join(self.symbols())})"


# The 2x2 square root of minus one: row 0 -> +column 1, row 1 -> -column 0.
I_UNIT = SignedPermOp([1, 0], [1, -1])


def compose(A: SignedPermOp, B: SignedPermOp) -> SignedPermOp:
    """Matrix product A∘B"""
    if A.dim != B.dim:
        raise DimensionMismatch(f"Cannot compose dim {A.dim} with dim {B.dim}")
    return SignedPermOp(B.target[A.target], A.sign * B.sign[A.target], validate=False)


def negate(A: SignedPermOp) -> SignedPermOp:
    return SignedPermOp(A.target, -A.sign, validate=False)


def adjoint(A: SignedPermOp) -> SignedPermOp:
    """Transpose; signs travel with their entries"""
    target = np.empty_like(A.target)
    sign = np.empty_like(A.sign)
    target[A.target] = np.arange(A.dim)
    sign[A.target] = A.sign
    return SignedPermOp(target, sign, validate=False)


def bar_replicate(A: SignedPermOp, ambient_dim: int) -> SignedPermOp:
    """Block-diagonal operator holding ambient_dim / A.dim copies of A"""
    if not is_power_of_two(ambient_dim) or ambient_dim % A.dim:
        raise InvalidDimension(f"Ambient dimension {ambient_dim} is not a power-of-two multiple of {A.dim}")
    copies = ambient_dim // A.dim
    if copies == 1:
        return A
    offsets = np.arange(copies, dtype=np.int64)[:, None] * A.dim
    target = (offsets + A.target[None, :]).ravel()
    return SignedPermOp(target, np.tile(A.sign, copies), validate=False)


def apply(A: SignedPermOp, s: CoSequence) -> CoSequence:
    if A.dim != s.length:
        raise DimensionMismatch(f"Operator dim {A.dim} does not match co-sequence length {s.length}")
    return CoSequence(s.label, A.sign * s.signs[A.target])


def equals(A: SignedPermOp, B: SignedPermOp) -> bool:
    return A.dim == B.dim and np.array_equal(A.target, B.target) and np.array_equal(A.sign, B.sign)


def is_unitary(A: SignedPermOp) -> bool:
    return equals(compose(adjoint(A), A), SignedPermOp.identity(A.dim))


def is_hermitian(A: SignedPermOp) -> bool:
    """(i∘A)* == i∘A with i bar-replicated to A.dim"""
    if A.dim < 2:
        return False
    iA = compose(bar_replicate(I_UNIT, A.dim), A)
    return equals(adjoint(iA), iA)


def block_matrix(blocks, block_dim: int) -> SignedPermOp:
    """Assemble an operator from a square grid of blocks.

    ``blocks[i][j]`` is a SignedPermOp of ``block_dim`` or None (blank).
    Each block row must contain exactly one non-blank block.
    """
    n = len(blocks)
    target = np.empty(n * block_dim, dtype=np.int64)
    sign = np.empty(n * block_dim, dtype=np.int8)
    for i, row in enumerate(blocks):
        filled = [(j, op) for j, op in enumerate(row) if op is not None]
        if len(filled) != 1:
            raise InvalidDimension(f"Block row {i} must hold exactly one operator, found {len(filled)}")
        j, op = filled[0]
        if op.dim != block_dim:
            raise DimensionMismatch(f"Block ({i},{j}) has dim {op.dim}, expected {block_dim}")
        rows = slice(i * block_dim, (i + 1) * block_dim)
        target[rows] = op.target + j * block_dim
        sign[rows] = op.sign
    return SignedPermOp(target, sign)
