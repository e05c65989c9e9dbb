"""Pure-numpy group kernels, the fallback when the compiled extension is absent.

Each function takes a 2-D float64 stack whose rows are the groups plus a
per-row threshold/radius vector, and returns a new array (or fills `out`).
Semantics match ``coclust._kernels``; only summation order may differ at
machine precision.
"""

import numpy as np


def _finish(result, out):
    if out is None:
        return result
    np.copyto(out, result)
    return out


def block_soft_threshold(V, t, out=None):
    """Rowwise prox of t_i*||.||_2: scale row i by (1 - t_i/||row||_2)+."""
    V = np.asarray(V, dtype=np.float64)
    nrm = np.sqrt(np.einsum("ij,ij->i", V, V))
    scale = np.zeros_like(nrm)
    alive = nrm > t
    scale[alive] = 1.0 - t[alive] / nrm[alive]
    if out is None:
        return V * scale[:, None]
    return np.multiply(V, scale[:, None], out=out)


def soft_threshold(V, t, out=None):
    """Elementwise soft threshold of row i at t_i."""
    V = np.asarray(V, dtype=np.float64)
    return _finish(np.sign(V) * np.maximum(np.abs(V) - t[:, None], 0.0), out)


def clamp(V, r, out=None):
    """Rowwise projection onto the sup-norm ball: clip row i to [-r_i, r_i]."""
    V = np.asarray(V, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)[:, None]
    return np.clip(V, -r, r, out=out) if out is not None else np.clip(V, -r, r)


def project_l2_ball(V, r, out=None):
    """Rowwise Euclidean projection onto the l2 ball of radius r_i."""
    V = np.asarray(V, dtype=np.float64)
    nrm = np.sqrt(np.einsum("ij,ij->i", V, V))
    scale = np.ones_like(nrm)
    outside = nrm > r
    scale[outside] = r[outside] / nrm[outside]
    if out is None:
        return V * scale[:, None]
    return np.multiply(V, scale[:, None], out=out)


def project_l1_ball(V, r, out=None):
    """Rowwise Euclidean projection onto the l1 ball of radius r_i.

    Exact sort-based algorithm; the stable sort keeps tie handling
    deterministic.
    """
    V = np.asarray(V, dtype=np.float64)
    if V.size == 0:
        return _finish(V.copy(), out)
    m, d = V.shape
    A = np.abs(V)
    inside = A.sum(axis=1) <= r
    u = np.sort(A, axis=1, kind="stable")[:, ::-1]
    css = np.cumsum(u, axis=1)
    j = np.arange(1, d + 1)
    positive = u - (css - r[:, None]) / j > 0
    # largest index where the Duchi condition holds (a prefix of each row)
    rho = d - 1 - np.argmax(positive[:, ::-1], axis=1)
    theta = (css[np.arange(m), rho] - r) / (rho + 1)
    res = np.sign(V) * np.maximum(A - theta[:, None], 0.0)
    res[inside] = V[inside]
    res[r <= 0] = 0.0
    return _finish(res, out)


def edge_diff(U, heads, tails, out=None):
    """Per-edge row differences out[e] = U[heads[e]] - U[tails[e]]."""
    U = np.asarray(U, dtype=np.float64)
    if out is None:
        return U[heads] - U[tails]
    return np.subtract(U[heads], U[tails], out=out)


def edge_adj(R, heads, tails, n, out=None):
    """Adjoint scatter out[heads[e]] += R[e], out[tails[e]] -= R[e]."""
    R = np.asarray(R, dtype=np.float64)
    if out is None:
        out = np.zeros((n, R.shape[1]))
    else:
        out[...] = 0.0
    np.add.at(out, heads, R)
    np.subtract.at(out, tails, R)
    return out
