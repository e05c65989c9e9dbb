"""Proximal operators of weighted group l_q norms and dual-ball projections.

A "group" is one fusion edge's difference vector. Stacks hold one group per
row, so column-mode blocks are passed in transposed. The weighted penalty
``scale * w_e * ||.||_q`` acts groupwise, which reduces every operation to a
rowwise kernel with per-row threshold ``scale * w_e``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels

_INF = float("inf")


def check_q(q):
    """Normalize the norm selector to one of 1.0, 2.0, inf."""
    qf = float(q)
    if qf not in (1.0, 2.0, _INF):
        raise ValueError(f"q must be 1, 2 or inf, got {q!r}")
    return qf


def dual_q(q):
    """Holder conjugate: 1 <-> inf, 2 <-> 2."""
    q = check_q(q)
    if q == 1.0:
        return _INF
    if q == _INF:
        return 1.0
    return 2.0


def group_norms(V, q):
    """Rowwise l_q norms of a 2-D stack of groups."""
    V = np.asarray(V, dtype=np.float64)
    q = check_q(q)
    if V.shape[1] == 0:
        return np.zeros(V.shape[0])
    if q == 1.0:
        return np.abs(V).sum(axis=1)
    if q == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", V, V))
    return np.abs(V).max(axis=1)


@dataclass(frozen=True)
class GroupPenalty:
    """Weighted group penalty scale*w_e*||.||_q, one weight per group."""

    q: float
    scale: float
    edge_weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "q", check_q(self.q))
        object.__setattr__(self, "scale", float(self.scale))
        w = np.asarray(self.edge_weights, dtype=np.float64).ravel()
        object.__setattr__(self, "edge_weights", w)
        if not (np.isfinite(self.scale) and self.scale >= 0.0):
            raise ValueError(f"penalty scale must be >= 0, got {self.scale}")
        if w.size and not (np.isfinite(w).all() and (w > 0.0).all()):
            raise ValueError("all edge weights must be positive and finite")

    @property
    def thresholds(self):
        return self.scale * self.edge_weights


def _as_group_stack(Vin, pen):
    # contiguity keeps the rowwise kernels cache-friendly on transposed input
    V = np.ascontiguousarray(Vin, dtype=np.float64)
    if V.ndim != 2:
        raise ValueError(f"expected a 2-D stack of groups, got ndim={V.ndim}")
    if V.shape[0] != pen.edge_weights.size:
        raise ValueError(
            f"{V.shape[0]} groups but {pen.edge_weights.size} edge weights"
        )
    return V


def prox_group(Vin, pen, out=None):
    """Groupwise prox of the penalty: argmin_x .5*||x-v||^2 + t_e*||x||_q.

    q=2 is the block soft threshold, q=1 the elementwise soft threshold,
    q=inf uses Moreau's identity against the l1-ball projection. `out`, when
    given, must be a C-contiguous stack not aliasing the input.
    """
    V = _as_group_stack(Vin, pen)
    t = pen.thresholds
    if pen.q == 2.0:
        return kernels.block_soft_threshold(V, t, out)
    if pen.q == 1.0:
        return kernels.soft_threshold(V, t, out)
    proj = kernels.project_l1_ball(V, t, out)
    return np.subtract(V, proj, out=proj)


def project_dual_ball(Zin, pen, out=None):
    """Groupwise Euclidean projection onto the radius-t_e dual-norm ball.

    The dual of l_q is l_q*: q=2 stays the l2 ball, q=1 clips to the sup-norm
    ball, q=inf projects onto the l1 ball.
    """
    Z = _as_group_stack(Zin, pen)
    r = pen.thresholds
    if pen.q == 2.0:
        return kernels.project_l2_ball(Z, r, out)
    if pen.q == 1.0:
        return kernels.clamp(Z, r, out)
    return kernels.project_l1_ball(Z, r, out)


def moreau_check(v, pen):
    """Residual of Moreau's decomposition prox(v) + proj(v) - v for one group.

    Ties the prox and the dual projection together; must be ~0 (<= 1e-10)
    for every input.
    """
    v = np.asarray(v, dtype=np.float64).ravel()[None, :]
    p = prox_group(v, pen)
    b = project_dual_ball(v, pen)
    return float(np.linalg.norm(p + b - v))
