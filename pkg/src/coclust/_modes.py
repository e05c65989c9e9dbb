"""Internal mode-wise tensor primitives shared across modules.

Tensors are plain C-contiguous float64 ndarrays; the canonical vectorization
order is C order (last index fastest).
"""

import numpy as np
import scipy.sparse as sp


def unfold(T, mode):
    """Matricize along `mode`: rows are the vectorized mode-`mode` slices."""
    T = np.asarray(T)
    return np.moveaxis(T, mode, 0).reshape(T.shape[mode], -1)


def fold(M, mode, dims):
    """Inverse of :func:`unfold` for a tensor of shape `dims` (with
    ``dims[mode]`` replaced by the row count of `M`)."""
    shape = list(dims)
    shape[mode] = M.shape[0]
    moved = [shape[mode]] + shape[:mode] + shape[mode + 1 :]
    return np.moveaxis(M.reshape(moved), 0, mode)


def apply_mode(T, M, mode):
    """Mode-`mode` product of tensor `T` with matrix `M` (dense or sparse).

    ``M`` has shape (r, dims[mode]); the result replaces the mode extent by r.
    """
    T = np.asarray(T)
    if M.shape[1] != T.shape[mode]:
        raise ValueError(
            f"mode-{mode} product: matrix has {M.shape[1]} columns, "
            f"tensor extent is {T.shape[mode]}"
        )
    if sp.issparse(M):
        out = M @ unfold(T, mode)
        return fold(np.asarray(out), mode, T.shape)
    M = np.asarray(M)
    return np.moveaxis(np.tensordot(M, T, axes=([1], [mode])), 0, mode)
