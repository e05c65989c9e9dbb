"""Primal-update linear systems solved through cached eigendecompositions.

The coefficient operator is identity plus rho times a sum of per-mode graph
Laplacians, all symmetric PSD, so one symmetric eigendecomposition per mode
turns every solve into mode products and an entrywise division. The
factorization is computed once and reused across all iterations.
"""

import numpy as np

from ._modes import apply_mode

DEFAULT_SIZE_CAP = 5000


class CachedFactorization:
    """Eigendecompositions Q_j diag(L_j) Q_j^T of the mode Laplacians.

    Immutable apart from the memoized entrywise divisor, which is keyed on
    the last rho used; the eigen data itself is rho-independent.
    """

    def __init__(self, eigvecs, eigvals):
        self.eigvecs = [np.asarray(Q, dtype=np.float64) for Q in eigvecs]
        self.eigvals = [np.asarray(w, dtype=np.float64) for w in eigvals]
        if len(self.eigvecs) != len(self.eigvals):
            raise ValueError("one eigenvector matrix per eigenvalue vector")
        self.rho = None
        self._divisor = None

    @property
    def n_modes(self):
        return len(self.eigvals)

    @property
    def dims(self):
        return tuple(len(w) for w in self.eigvals)

    def divisor(self, rho):
        """Entrywise divisor 1 + rho * sum_j L_j[i_j], cached per rho."""
        if self._divisor is None or self.rho != rho:
            acc = np.zeros(self.dims)
            for j, w in enumerate(self.eigvals):
                shape = [1] * self.n_modes
                shape[j] = w.size
                acc = acc + w.reshape(shape)
            self._divisor = 1.0 + rho * acc
            self.rho = rho
        return self._divisor


def factor(ops, size_cap=DEFAULT_SIZE_CAP):
    """Eigendecompose every mode Laplacian of the given difference operators.

    Deterministic up to eigenvector sign; tiny negative eigenvalues from
    roundoff are clipped to zero so divisors stay >= 1.
    """
    eigvecs, eigvals = [], []
    for j, op in enumerate(ops):
        n = op.n_vertices
        if n > size_cap:
            raise ValueError(
                f"mode {j} has {n} vertices, above the dense factorization "
                f"cap {size_cap}; use the generalized ADMM solver instead"
            )
        L = op.laplacian().toarray()
        try:
            w, Q = np.linalg.eigh(L)
        except np.linalg.LinAlgError as err:
            raise np.linalg.LinAlgError(
                f"eigendecomposition failed for mode {j}: {err}"
            ) from err
        eigvals.append(np.maximum(w, 0.0))
        eigvecs.append(Q)
    return CachedFactorization(eigvecs, eigvals)


def sylvester_solve(fact, rho, RHS):
    """Solve U + rho*L_row U + rho*U L_col = RHS for a two-mode system.

    Transforms into the shared eigenbasis, divides by the cached entrywise
    spectrum shift, and transforms back.
    """
    if fact.n_modes != 2:
        raise ValueError(f"matrix solve needs a 2-mode factorization, got {fact.n_modes}")
    RHS = np.asarray(RHS, dtype=np.float64)
    if RHS.shape != fact.dims:
        raise ValueError(f"RHS has shape {RHS.shape}, factorization is {fact.dims}")
    if rho == 0.0:
        return RHS.copy()
    Q0, Q1 = fact.eigvecs
    T = Q0.T @ RHS @ Q1
    return Q0 @ (T / fact.divisor(rho)) @ Q1.T


def tensor_sylvester_solve(fact, rho, RHS):
    """Solve U + rho * sum_j U x_j L_j = RHS for any number of modes."""
    RHS = np.asarray(RHS, dtype=np.float64)
    if RHS.shape != fact.dims:
        raise ValueError(f"RHS has shape {RHS.shape}, factorization is {fact.dims}")
    if rho == 0.0:
        return RHS.copy()
    T = RHS
    for j, Q in enumerate(fact.eigvecs):
        T = apply_mode(T, Q.T, j)
    T = T / fact.divisor(rho)
    for j, Q in enumerate(fact.eigvecs):
        T = apply_mode(T, Q, j)
    return T
