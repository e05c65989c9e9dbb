"""Splitting algorithms for the matrix (two-mode) co-clustering problem.

Four solvers share one stopping rule and one trace format:

* ``admm_solve``      two-block ADMM; the primal update is a Sylvester solve
                      against a cached eigendecomposition.
* ``gadmm_solve``     generalized ADMM; the quadratic augmentation turns the
                      primal update into a closed form with no linear solve.
* ``davis_yin_solve`` three-block splitting / AMA; explicit primal update and
                      dual-ball projections, step size bounded by the graph
                      degrees.
* ``cobra_solve``     Dykstra-like alternation of row-only and column-only
                      clustering sub-problems with correction variables.

All solvers start from U = X, V = D U, Z = 0, hold the dual variables
unscaled, and record (iteration, elapsed, objective, primal, dual) every
iteration. Inner loops run on preallocated buffers through the gather/scatter
edge kernels; the column-mode copy/dual blocks are kept transposed (one edge
group per contiguous row) and the state exposes them in the natural
n x |edges| orientation.
"""

import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from ._backend import kernels
from .linsolve import factor, sylvester_solve
from .model import WeightGraph, ProblemInstance, build_difference_operator
from .proxops import GroupPenalty, dual_q, group_norms, project_dual_ball, prox_group

RESTART_ETA = 0.999

ALGORITHMS = ("admm", "gadmm", "davis-yin", "cobra")


class DivergenceError(RuntimeError):
    """A solver produced a non-finite iterate."""

    def __init__(self, algorithm, iteration):
        super().__init__(
            f"{algorithm} diverged: non-finite iterate at iteration {iteration}"
        )
        self.algorithm = algorithm
        self.iteration = iteration


@dataclass
class SolverParams:
    """Knobs shared by all solvers.

    rho: augmented-Lagrangian parameter (ADMM/GADMM; default 1 as in the
        reference experiments). Davis-Yin ignores it unless dy_step_policy
        carries an explicit value.
    alpha: generalized-ADMM augmentation constant; None picks
        rho * (2*maxdeg_row + 2*maxdeg_col), which keeps the augmented
        quadratic positive semidefinite.
    dy_step_policy: "auto" (rho = 1 / (2 * degree bound), strictly inside the
        convergence region) or an explicit rho for Davis-Yin.
    dy_radius_over_rho: compatibility switch scaling the Davis-Yin dual-ball
        radius by 1/rho; the unscaled-dual derivation gives radius lambda*w.
    track_stationarity: record the primal-update stationarity residual each
        iteration (ADMM only; costs two extra operator products).
    """

    rho: float = 1.0
    alpha: float | None = None
    max_iter: int = 10000
    tol: float = 1e-6
    accelerate: bool = False
    dy_step_policy: float | str = "auto"
    dy_radius_over_rho: bool = False
    track_stationarity: bool = False

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError(f"alpha must be positive or None, got {self.alpha}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.dy_step_policy != "auto" and not float(self.dy_step_policy) > 0:
            raise ValueError("dy_step_policy must be 'auto' or a positive rho")


@dataclass
class ConvergenceTrace:
    """Per-iteration record; elapsed uses a monotonic clock."""

    iterations: list = field(default_factory=list)
    elapsed_s: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    primal_res: list = field(default_factory=list)
    dual_res: list = field(default_factory=list)

    HEADER = ("iter", "elapsed_s", "objective", "primal_res", "dual_res")

    def append(self, it, elapsed, obj, primal, dual):
        self.iterations.append(int(it))
        self.elapsed_s.append(float(elapsed))
        self.objective.append(float(obj))
        self.primal_res.append(float(primal))
        self.dual_res.append(float(dual))

    def __len__(self):
        return len(self.iterations)

    def rows(self):
        return zip(
            self.iterations,
            self.elapsed_s,
            self.objective,
            self.primal_res,
            self.dual_res,
        )

    @property
    def final_objective(self):
        return self.objective[-1]


@dataclass
class SolverState:
    """Primal, copy, and dual variables of a (possibly partial) solve.

    V_row/Z_row are |E_row| x p, V_col/Z_col are n x |E_col|; `accel`
    carries the momentum state (previous iterates, combined residual,
    coefficient, restart count) when acceleration was used.
    """

    U: np.ndarray
    V_row: np.ndarray
    V_col: np.ndarray
    Z_row: np.ndarray
    Z_col: np.ndarray
    iterations: int = 0
    converged: bool = False
    inner_iterations: int | None = None
    stationarity_residuals: list | None = None
    accel: object | None = None

    def mode_copy_groups(self):
        """Copy variables as per-mode stacks with one edge group per row."""
        return [self.V_row, self.V_col.T]


def operator_norm_bound(ops):
    """Degree bound 2*maxdeg per mode, summed over modes.

    Each term bounds the largest singular value of that mode's incidence
    matrix (Laplacian eigenvalue bound), so the sum bounds the norm of the
    stacked difference operator. Empty graphs contribute zero.
    """
    return float(sum(2 * op.max_degree for op in ops))


class _MatrixOps:
    """Edge gather/scatter products for the two-mode problem.

    Row blocks are |E_row| x p stacks; column blocks are handled in the
    transposed |E_col| x n layout so every product walks contiguous rows.
    Adjoint results land in internal scratch (valid until the next call);
    instances own their buffers and are not shared across solves.
    """

    def __init__(self, inst):
        ops = inst.difference_operators()
        self.row, self.col = ops
        n, p = inst.data.shape
        self.n, self.p = n, p
        self._adj_r = np.empty((n, p))
        self._adj_c = np.empty((p, n))
        self._ut = np.empty((p, n))

    def row_diff(self, U, out=None):
        return kernels.edge_diff(U, self.row.heads, self.row.tails, out)

    def col_diff_g(self, U, out=None):
        np.copyto(self._ut, U.T)
        return kernels.edge_diff(self._ut, self.col.heads, self.col.tails, out)

    def adj_pair(self, Rr, Rc_g, out):
        """out = D_row^T Rr + (D_col^T Rc_g)^T, the (n, p) adjoint sum."""
        a = kernels.edge_adj(Rr, self.row.heads, self.row.tails, self.n, self._adj_r)
        b = kernels.edge_adj(Rc_g, self.col.heads, self.col.tails, self.p, self._adj_c)
        return np.add(a, b.T, out=out)

    def adj_pair_norm2(self, Rr, Rc_g):
        """Squared Frobenius norm of the adjoint sum (expanded, no transpose)."""
        a = kernels.edge_adj(Rr, self.row.heads, self.row.tails, self.n, self._adj_r)
        b = kernels.edge_adj(Rc_g, self.col.heads, self.col.tails, self.p, self._adj_c)
        return float(
            np.vdot(a, a) + np.vdot(b, b) + 2.0 * np.einsum("ij,ji->", a, b)
        )

    def pair(self):
        return [self.row, self.col]


def _frob2(*arrays):
    return float(sum(np.vdot(a, a) for a in arrays))


def _objective(inst, U, DUr, DUc_g, ops, scratch=None):
    if scratch is None:
        R = inst.data - U
    else:
        R = np.subtract(inst.data, U, out=scratch)
    loss = 0.5 * float(np.vdot(R, R))
    pen = 0.0
    if ops.row.n_edges:
        pen += float(ops.row.edge_weights @ group_norms(DUr, inst.q))
    if ops.col.n_edges:
        pen += float(ops.col.edge_weights @ group_norms(DUc_g, inst.q))
    return loss + inst.lam * pen


class _Momentum:
    """Fast-ADMM extrapolation with residual-based restart.

    Extrapolates a list of carried arrays; the combined residual weights the
    copy blocks by rho and the dual blocks by 1/rho. On a failed residual
    decrease the extrapolation is rewound to the previous iterate and the
    momentum coefficient resets. Inputs are copied, so callers may recycle
    the arrays they pass in.
    """

    def __init__(self, arrays, weights):
        self.weights = list(weights)
        self.prev = [np.array(a) for a in arrays]
        self.hat = [np.array(a) for a in arrays]
        self.t = 1.0
        self.c = np.inf
        self.restarts = 0

    def update(self, new):
        c = sum(w * _frob2(n - h) for w, n, h in zip(self.weights, new, self.hat))
        if c < RESTART_ETA * self.c:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * self.t**2))
            beta = (self.t - 1.0) / t_next
            self.hat = [n + beta * (n - p) for n, p in zip(new, self.prev)]
            self.t = t_next
            self.c = c
        else:
            self.hat = [p.copy() for p in self.prev]
            self.t = 1.0
            self.c = self.c / RESTART_ETA
            self.restarts += 1
        self.prev = [np.array(n) for n in new]
        return self.hat


class _Blocks:
    """Double-buffered V/Z pairs (row stack + transposed column stack)."""

    def __init__(self, ops, U):
        V0r = ops.row_diff(U)
        V0c = ops.col_diff_g(U)
        self.V_r = [V0r, np.empty_like(V0r)]
        self.V_c = [V0c, np.empty_like(V0c)]
        self.Z_r = [np.zeros_like(V0r), np.empty_like(V0r)]
        self.Z_c = [np.zeros_like(V0c), np.empty_like(V0c)]
        self.Rr = np.empty_like(V0r)
        self.Rc = np.empty_like(V0c)
        self.sr = np.empty_like(V0r)
        self.sc = np.empty_like(V0c)

    def old(self, k):
        i = (k - 1) % 2
        return self.V_r[i], self.V_c[i], self.Z_r[i], self.Z_c[i]

    def new(self, k):
        i = k % 2
        return self.V_r[i], self.V_c[i], self.Z_r[i], self.Z_c[i]


def _require_matrix(inst):
    if not inst.is_matrix:
        raise ValueError(
            "matrix solvers need two-mode data; use tensorcc.tensor_solve"
        )


def _final_state(U, Vr, Vc_g, Zr, Zc_g, **kw):
    return SolverState(
        U=U.copy(),
        V_row=Vr.copy(),
        V_col=np.ascontiguousarray(Vc_g.T),
        Z_row=Zr.copy(),
        Z_col=np.ascontiguousarray(Zc_g.T),
        **kw,
    )


def admm_solve(inst, params=None):
    """Two-block ADMM with the cached-factorization Sylvester primal update.

    Stops when both the relative primal residual ||DU - V|| /
    max(||DU||, ||V||, 1) and the relative dual residual
    rho*||D^T dV|| / max(||D^T Z||, 1) drop below tol.
    """
    params = params or SolverParams()
    _require_matrix(inst)
    ops = _MatrixOps(inst)
    rho = params.rho
    inv_rho = 1.0 / rho
    fact = factor(ops.pair())
    pen_row = GroupPenalty(inst.q, inst.lam / rho, ops.row.edge_weights)
    pen_col = GroupPenalty(inst.q, inst.lam / rho, ops.col.edge_weights)
    X = inst.data
    x_norm = max(float(np.linalg.norm(X)), 1e-300)
    U = X.copy()
    blk = _Blocks(ops, U)
    sr, sc = blk.sr, blk.sc
    Rr, Rc = blk.Rr, blk.Rc
    W = np.empty_like(X)
    DUr = np.empty_like(Rr)
    DUc = np.empty_like(Rc)
    hVr, hVc, hZr, hZc = blk.old(1)
    mom = (
        _Momentum(list(blk.old(1)), [rho, rho, inv_rho, inv_rho])
        if params.accelerate
        else None
    )
    stat_res = [] if params.track_stationarity else None

    trace = ConvergenceTrace()
    t0 = time.perf_counter()
    converged = False
    k = 0
    for k in range(1, params.max_iter + 1):
        Vr, Vc, Zr, Zc = blk.old(k)
        Vr_new, Vc_new, Zr_new, Zc_new = blk.new(k)

        np.multiply(hZr, -inv_rho, out=sr)
        sr += hVr
        np.multiply(hZc, -inv_rho, out=sc)
        sc += hVc
        ops.adj_pair(sr, sc, out=W)
        np.multiply(W, rho, out=W)
        W += X
        U = sylvester_solve(fact, rho, W)
        ops.row_diff(U, out=DUr)
        ops.col_diff_g(U, out=DUc)
        if stat_res is not None:
            lhs = U + rho * ops.adj_pair(DUr, DUc, out=np.empty_like(X))
            stat_res.append(float(np.linalg.norm(lhs - W)) / x_norm)
        np.multiply(hZr, inv_rho, out=sr)
        sr += DUr
        prox_group(sr, pen_row, out=Vr_new)
        np.multiply(hZc, inv_rho, out=sc)
        sc += DUc
        prox_group(sc, pen_col, out=Vc_new)
        np.subtract(DUr, Vr_new, out=Rr)
        np.subtract(DUc, Vc_new, out=Rc)
        np.multiply(Rr, rho, out=sr)
        np.add(hZr, sr, out=Zr_new)
        np.multiply(Rc, rho, out=sc)
        np.add(hZc, sc, out=Zc_new)

        obj = _objective(inst, U, DUr, DUc, ops)
        if not np.isfinite(obj):
            raise DivergenceError("admm", k)
        primal = np.sqrt(_frob2(Rr, Rc)) / max(
            np.sqrt(_frob2(DUr, DUc)), np.sqrt(_frob2(Vr_new, Vc_new)), 1.0
        )
        np.subtract(Vr_new, Vr, out=sr)
        np.subtract(Vc_new, Vc, out=sc)
        dual = (
            rho
            * np.sqrt(ops.adj_pair_norm2(sr, sc))
            / max(np.sqrt(ops.adj_pair_norm2(Zr_new, Zc_new)), 1.0)
        )
        trace.append(k, time.perf_counter() - t0, obj, primal, dual)
        if primal <= params.tol and dual <= params.tol:
            converged = True
            break
        if mom is not None:
            hVr, hVc, hZr, hZc = mom.update([Vr_new, Vc_new, Zr_new, Zc_new])
        else:
            hVr, hVc, hZr, hZc = Vr_new, Vc_new, Zr_new, Zc_new

    Vr, Vc, Zr, Zc = blk.new(k)
    return (
        _final_state(
            U, Vr, Vc, Zr, Zc,
            iterations=k, converged=converged,
            stationarity_residuals=stat_res, accel=mom,
        ),
        trace,
    )


def gadmm_solve(inst, params=None):
    """Generalized ADMM: augmented primal update, no linear solve.

    The update is a weighted average of the data-plus-adjoint step and the
    previous iterate, with divisor (1 + alpha); everything else matches
    admm_solve.
    """
    params = params or SolverParams()
    _require_matrix(inst)
    ops = _MatrixOps(inst)
    rho = params.rho
    inv_rho = 1.0 / rho
    alpha = params.alpha
    if alpha is None:
        alpha = rho * operator_norm_bound(ops.pair())
    pen_row = GroupPenalty(inst.q, inst.lam / rho, ops.row.edge_weights)
    pen_col = GroupPenalty(inst.q, inst.lam / rho, ops.col.edge_weights)
    X = inst.data
    U = X.copy()
    U_next = np.empty_like(X)
    X_frac = X / (1.0 + alpha)
    a_frac = alpha / (1.0 + alpha)
    r_frac = rho / (1.0 + alpha)
    blk = _Blocks(ops, U)
    sr, sc = blk.sr, blk.sc
    Rr, Rc = blk.Rr, blk.Rc
    W = np.empty_like(X)
    DUr = blk.V_r[0].copy()
    DUc = blk.V_c[0].copy()
    hVr, hVc, hZr, hZc = blk.old(1)
    mom = (
        _Momentum(list(blk.old(1)), [rho, rho, inv_rho, inv_rho])
        if params.accelerate
        else None
    )

    trace = ConvergenceTrace()
    t0 = time.perf_counter()
    converged = False
    k = 0
    for k in range(1, params.max_iter + 1):
        Vr, Vc, Zr, Zc = blk.old(k)
        Vr_new, Vc_new, Zr_new, Zc_new = blk.new(k)

        np.multiply(hZr, -inv_rho, out=sr)
        sr += hVr
        sr -= DUr
        np.multiply(hZc, -inv_rho, out=sc)
        sc += hVc
        sc -= DUc
        ops.adj_pair(sr, sc, out=W)
        np.multiply(U, a_frac, out=U_next)
        U_next += X_frac
        np.multiply(W, r_frac, out=W)
        U_next += W
        U, U_next = U_next, U
        ops.row_diff(U, out=DUr)
        ops.col_diff_g(U, out=DUc)
        np.multiply(hZr, inv_rho, out=sr)
        sr += DUr
        prox_group(sr, pen_row, out=Vr_new)
        np.multiply(hZc, inv_rho, out=sc)
        sc += DUc
        prox_group(sc, pen_col, out=Vc_new)
        np.subtract(DUr, Vr_new, out=Rr)
        np.subtract(DUc, Vc_new, out=Rc)
        np.multiply(Rr, rho, out=sr)
        np.add(hZr, sr, out=Zr_new)
        np.multiply(Rc, rho, out=sc)
        np.add(hZc, sc, out=Zc_new)

        obj = _objective(inst, U, DUr, DUc, ops, scratch=W)
        if not np.isfinite(obj):
            raise DivergenceError("gadmm", k)
        primal = np.sqrt(_frob2(Rr, Rc)) / max(
            np.sqrt(_frob2(DUr, DUc)), np.sqrt(_frob2(Vr_new, Vc_new)), 1.0
        )
        np.subtract(Vr_new, Vr, out=sr)
        np.subtract(Vc_new, Vc, out=sc)
        dual = (
            rho
            * np.sqrt(ops.adj_pair_norm2(sr, sc))
            / max(np.sqrt(ops.adj_pair_norm2(Zr_new, Zc_new)), 1.0)
        )
        trace.append(k, time.perf_counter() - t0, obj, primal, dual)
        if primal <= params.tol and dual <= params.tol:
            converged = True
            break
        if mom is not None:
            hVr, hVc, hZr, hZc = mom.update([Vr_new, Vc_new, Zr_new, Zc_new])
        else:
            hVr, hVc, hZr, hZc = Vr_new, Vc_new, Zr_new, Zc_new

    Vr, Vc, Zr, Zc = blk.new(k)
    return (
        _final_state(
            U, Vr, Vc, Zr, Zc, iterations=k, converged=converged, accel=mom,
        ),
        trace,
    )


def davis_yin_solve(inst, params=None):
    """Three-block Davis-Yin splitting (equivalently the AMA).

    Explicit primal update U = X - D_row^T Z_row - Z_col D_col^T, then the
    Moreau-simplified dual update projects Z + rho*DU onto the lambda*w_e
    dual-norm balls. The copy variables are recovered from the dual step for
    residual and cluster reporting. The automatic step policy takes rho =
    1 / (2 * degree bound), strictly below the 1/||L|| requirement.
    """
    params = params or SolverParams()
    _require_matrix(inst)
    ops = _MatrixOps(inst)
    bound = operator_norm_bound(ops.pair())
    if params.dy_step_policy == "auto":
        rho = 1.0 / (2.0 * bound) if bound > 0 else 1.0
    else:
        rho = float(params.dy_step_policy)
        if bound > 0 and rho >= 1.0 / bound:
            warnings.warn(
                f"Davis-Yin step rho={rho} is not below 1/bound={1.0 / bound}; "
                "iterates may diverge",
                RuntimeWarning,
                stacklevel=2,
            )
    inv_rho = 1.0 / rho
    radius = inst.lam / rho if params.dy_radius_over_rho else inst.lam
    pen_row = GroupPenalty(inst.q, radius, ops.row.edge_weights)
    pen_col = GroupPenalty(inst.q, radius, ops.col.edge_weights)
    X = inst.data
    U = np.empty_like(X)
    blk = _Blocks(ops, X)
    sr, sc = blk.sr, blk.sc
    Rr, Rc = blk.Rr, blk.Rc
    W = np.empty_like(X)
    DUr = np.empty_like(Rr)
    DUc = np.empty_like(Rc)
    hZr, hZc = blk.Z_r[0], blk.Z_c[0]
    mom = (
        _Momentum([hZr, hZc], [inv_rho, inv_rho]) if params.accelerate else None
    )

    trace = ConvergenceTrace()
    t0 = time.perf_counter()
    converged = False
    k = 0
    for k in range(1, params.max_iter + 1):
        Vr, Vc, _, _ = blk.old(k)
        Vr_new, Vc_new, Zr_new, Zc_new = blk.new(k)

        ops.adj_pair(hZr, hZc, out=W)
        np.subtract(X, W, out=U)
        ops.row_diff(U, out=DUr)
        ops.col_diff_g(U, out=DUc)
        np.multiply(DUr, rho, out=sr)
        sr += hZr
        project_dual_ball(sr, pen_row, out=Zr_new)
        np.multiply(DUc, rho, out=sc)
        sc += hZc
        project_dual_ball(sc, pen_col, out=Zc_new)
        # primal gap DU - V equals the scaled dual step (Z_new - hZ) / rho
        np.subtract(Zr_new, hZr, out=Rr)
        Rr *= inv_rho
        np.subtract(Zc_new, hZc, out=Rc)
        Rc *= inv_rho
        np.subtract(DUr, Rr, out=Vr_new)
        np.subtract(DUc, Rc, out=Vc_new)

        obj = _objective(inst, U, DUr, DUc, ops, scratch=W)
        if not np.isfinite(obj):
            raise DivergenceError("davis-yin", k)
        primal = np.sqrt(_frob2(Rr, Rc)) / max(
            np.sqrt(_frob2(DUr, DUc)), np.sqrt(_frob2(Vr_new, Vc_new)), 1.0
        )
        np.subtract(Vr_new, Vr, out=sr)
        np.subtract(Vc_new, Vc, out=sc)
        dual = (
            rho
            * np.sqrt(ops.adj_pair_norm2(sr, sc))
            / max(np.sqrt(ops.adj_pair_norm2(Zr_new, Zc_new)), 1.0)
        )
        trace.append(k, time.perf_counter() - t0, obj, primal, dual)
        if primal <= params.tol and dual <= params.tol:
            converged = True
            break
        if mom is not None:
            hZr, hZc = mom.update([Zr_new, Zc_new])
        else:
            hZr, hZc = Zr_new, Zc_new

    Vr, Vc, Zr, Zc = blk.new(k)
    return (
        _final_state(
            U, Vr, Vc, Zr, Zc, iterations=k, converged=converged, accel=mom,
        ),
        trace,
    )


def cobra_solve(inst, params=None, subsolver="admm", sub_tol=None):
    """Dykstra-like alternation of row-only and column-only clustering.

    Each outer round solves two one-mode convex clustering problems (the
    other mode's graph emptied) with correction variables added to the
    sub-problem data; the corrections conserve P + Q + U = X, which yields
    the joint optimum at the fixed point. Acceleration, when requested,
    applies inside the sub-problems. The trace logs one row per outer round:
    primal_res is the relative outer change (the stopping quantity),
    dual_res the row/column split disagreement.
    """
    params = params or SolverParams()
    _require_matrix(inst)
    if subsolver not in ("admm", "gadmm"):
        raise ValueError(f"subsolver must be 'admm' or 'gadmm', got {subsolver!r}")
    sub_fn = admm_solve if subsolver == "admm" else gadmm_solve
    sub_params = replace(
        params,
        tol=params.tol / 10.0 if sub_tol is None else sub_tol,
        track_stationarity=False,
    )
    ops = _MatrixOps(inst)
    row_graph, col_graph = inst.mode_graphs
    n, p = inst.data.shape
    empty_row = WeightGraph(n, ())
    empty_col = WeightGraph(p, ())

    X = inst.data
    x = X.copy()
    P = np.zeros_like(X)
    Q = np.zeros_like(X)
    row_state = col_state = None
    inner = 0

    trace = ConvergenceTrace()
    t0 = time.perf_counter()
    converged = False
    t = 0
    for t in range(1, params.max_iter + 1):
        try:
            row_state, _ = sub_fn(
                ProblemInstance(x + P, (row_graph, empty_col), inst.lam, inst.q),
                sub_params,
            )
            y = row_state.U
            inner += row_state.iterations
            P = x + P - y
            col_state, _ = sub_fn(
                ProblemInstance(y + Q, (empty_row, col_graph), inst.lam, inst.q),
                sub_params,
            )
            x_new = col_state.U
            inner += col_state.iterations
            Q = y + Q - x_new
        except DivergenceError as err:
            raise DivergenceError("cobra", t) from err

        change = float(np.linalg.norm(x_new - x))
        denom = float(np.linalg.norm(x))
        change = change / denom if denom > 0 else change
        split = float(np.linalg.norm(y - x_new)) / max(
            float(np.linalg.norm(x_new)), 1.0
        )
        DUr = ops.row_diff(x_new)
        DUc = ops.col_diff_g(x_new)
        obj = _objective(inst, x_new, DUr, DUc, ops)
        if not np.isfinite(obj):
            raise DivergenceError("cobra", t)
        trace.append(t, time.perf_counter() - t0, obj, change, split)
        x = x_new
        if change <= params.tol:
            converged = True
            break

    state = SolverState(
        U=x,
        V_row=row_state.V_row,
        V_col=col_state.V_col,
        Z_row=row_state.Z_row,
        Z_col=col_state.Z_col,
        iterations=t,
        converged=converged,
        inner_iterations=inner,
    )
    return state, trace


def kkt_residual(inst, state, rho=None):
    """Max of stationarity, dual-feasibility, and primal-gap residuals.

    Stationarity: ||U - X + D_row^T Z_row + Z_col D_col^T||_F / ||X||_F.
    Dual feasibility: largest positive excess of a dual group's conjugate
    norm over lambda * w_e. Primal gap: ||DU - V||_F / ||X||_F. The stored
    duals are unscaled, so the value does not depend on rho (the argument is
    accepted for call-site symmetry).
    """
    del rho
    _require_matrix(inst)
    ops = _MatrixOps(inst)
    X = inst.data
    x_norm = float(np.linalg.norm(X)) or 1.0
    qd = dual_q(inst.q)

    adj = ops.adj_pair(
        np.ascontiguousarray(state.Z_row),
        np.ascontiguousarray(state.Z_col.T),
        out=np.empty_like(X),
    )
    stat = float(np.linalg.norm(state.U - X + adj)) / x_norm
    viol = 0.0
    for op, Z in ((ops.row, state.Z_row), (ops.col, state.Z_col.T)):
        if op.n_edges:
            excess = group_norms(Z, qd) - inst.lam * op.edge_weights
            viol = max(viol, float(np.maximum(excess, 0.0).max()))
    gap = (
        np.sqrt(
            _frob2(
                ops.row_diff(state.U) - state.V_row,
                ops.col_diff_g(state.U) - state.V_col.T,
            )
        )
        / x_norm
    )
    return max(stat, viol, gap)


_SOLVERS = {
    "admm": admm_solve,
    "gadmm": gadmm_solve,
    "davis-yin": davis_yin_solve,
    "davis_yin": davis_yin_solve,
    "dy": davis_yin_solve,
    "cobra": cobra_solve,
}


def solve(inst, algorithm="admm", params=None, **kwargs):
    """Dispatch to one of the four matrix solvers by name."""
    try:
        fn = _SOLVERS[algorithm]
    except KeyError:
        raise ValueError(
            f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}"
        ) from None
    return fn(inst, params, **kwargs)
