import numpy as np

from invariant_set.sign_algebra import CoSequence, SignedPermOp


def to_dense(op: SignedPermOp) -> np.ndarray:
    dense = np.zeros((op.dim, op.dim), dtype=np.int64)
    dense[np.arange(op.dim), op.target] = op.sign
    return dense


def all_plus(config, label="a") -> CoSequence:
    return CoSequence.all_plus(label, config.L)
