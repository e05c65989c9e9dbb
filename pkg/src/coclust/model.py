"""Problem definition: fusion graphs, difference operators, objective, clusters.

The estimator fits centroids U to data X by minimizing

    0.5*||X - U||_F^2 + lambda * sum_modes sum_edges w_e * ||slice_i - slice_j||_q

over weighted fusion graphs, one per data mode. Difference operators are
unweighted signed incidence matrices; the fusion weights enter through the
prox thresholds, not through the operator.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from ._modes import apply_mode, unfold
from .proxops import check_q, group_norms


@dataclass(frozen=True)
class WeightGraph:
    """Weighted fusion graph on one data mode.

    Edges are (i, j, w) with i < j and w > 0, stored in canonical
    lexicographic order so operator construction is deterministic. Pairs with
    zero weight are simply absent.
    """

    n_vertices: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        canon = []
        for e in self.edges:
            i, j, w = e
            i, j, w = int(i), int(j), float(w)
            if not 0 <= i < j < self.n_vertices:
                raise ValueError(
                    f"malformed edge ({i}, {j}) for {self.n_vertices} vertices"
                )
            if not (np.isfinite(w) and w > 0.0):
                raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
            canon.append((i, j, w))
        canon.sort(key=lambda e: (e[0], e[1]))
        for a, b in zip(canon, canon[1:]):
            if a[:2] == b[:2]:
                raise ValueError(f"duplicate edge ({a[0]}, {a[1]})")
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def weights(self):
        return np.array([w for _, _, w in self.edges], dtype=np.float64)

    def endpoint_arrays(self):
        """Heads and tails as int arrays (canonical edge order)."""
        if not self.edges:
            return np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.intp)
        heads = np.array([i for i, _, _ in self.edges], dtype=np.intp)
        tails = np.array([j for _, j, _ in self.edges], dtype=np.intp)
        return heads, tails

    @property
    def max_degree(self):
        heads, tails = self.endpoint_arrays()
        if heads.size == 0:
            return 0
        counts = np.bincount(
            np.concatenate([heads, tails]), minlength=self.n_vertices
        )
        return int(counts.max())


@dataclass(frozen=True)
class DifferenceOperator:
    """Signed incidence matrix of a fusion graph, one (+1, -1) row per edge.

    The operator itself is unweighted; ``edge_weights`` rides along in the
    same canonical order for use in prox thresholds and dual radii. `heads`
    and `tails` duplicate the sparsity pattern for gather/scatter kernels.
    """

    incidence: sp.csr_array = field(repr=False)
    edge_weights: np.ndarray = field(repr=False)
    heads: np.ndarray = field(repr=False)
    tails: np.ndarray = field(repr=False)

    @property
    def n_edges(self):
        return self.incidence.shape[0]

    @property
    def n_vertices(self):
        return self.incidence.shape[1]

    @property
    def max_degree(self):
        if self.incidence.nnz == 0:
            return 0
        deg = np.abs(self.incidence).sum(axis=0)
        return int(np.asarray(deg).max())

    def laplacian(self):
        """Unweighted graph Laplacian incidence^T @ incidence (n x n, PSD)."""
        return (self.incidence.T @ self.incidence).tocsr()


def build_difference_operator(graph):
    """Build the incidence operator of a fusion graph.

    Row k carries +1 at the head and -1 at the tail of the k-th canonical
    edge; applying it to slices yields the per-edge differences.
    """
    m, n = graph.n_edges, graph.n_vertices
    heads, tails = graph.endpoint_arrays()
    rows = np.concatenate([np.arange(m), np.arange(m)])
    cols = np.concatenate([heads, tails])
    vals = np.concatenate([np.ones(m), -np.ones(m)])
    inc = sp.csr_array((vals, (rows, cols)), shape=(m, n))
    return DifferenceOperator(
        incidence=inc, edge_weights=graph.weights, heads=heads, tails=tails
    )


@dataclass(frozen=True)
class ProblemInstance:
    """Data plus per-mode fusion graphs plus the penalty (lambda, q)."""

    data: np.ndarray = field(repr=False)
    mode_graphs: tuple
    lam: float
    q: float = 2.0

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim < 1:
            raise ValueError("data must have at least one mode")
        graphs = tuple(self.mode_graphs)
        if len(graphs) != data.ndim:
            raise ValueError(
                f"{data.ndim}-mode data needs {data.ndim} graphs, "
                f"got {len(graphs)}"
            )
        for j, g in enumerate(graphs):
            if g.n_vertices != data.shape[j]:
                raise ValueError(
                    f"mode-{j} graph has {g.n_vertices} vertices, "
                    f"data extent is {data.shape[j]}"
                )
        lam = float(self.lam)
        if not (np.isfinite(lam) and lam >= 0.0):
            raise ValueError(f"lambda must be finite and >= 0, got {lam}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "mode_graphs", graphs)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "q", check_q(self.q))

    @property
    def n_modes(self):
        return self.data.ndim

    @property
    def is_matrix(self):
        return self.data.ndim == 2

    def difference_operators(self):
        return [build_difference_operator(g) for g in self.mode_graphs]


@dataclass(frozen=True)
class ClusterAssignment:
    """Per-mode cluster labels, contiguous ints from 0."""

    labels_per_mode: tuple
    n_clusters_per_mode: tuple


def objective_value(inst, U):
    """Objective 0.5*||X-U||_F^2 + lambda * weighted fusion penalty at U."""
    U = np.asarray(U, dtype=np.float64)
    if U.shape != inst.data.shape:
        raise ValueError(f"U has shape {U.shape}, data is {inst.data.shape}")
    loss = 0.5 * float(np.sum((inst.data - U) ** 2))
    penalty = 0.0
    for j, graph in enumerate(inst.mode_graphs):
        if graph.n_edges == 0:
            continue
        op = build_difference_operator(graph)
        diffs = unfold(apply_mode(U, op.incidence, j), j)
        penalty += float(op.edge_weights @ group_norms(diffs, inst.q))
    return loss + inst.lam * penalty


def gaussian_knn_weights(data, mode, k=4, phi="auto"):
    """Sparse Gaussian kernel weights on the k-nearest-neighbor graph.

    Slices along `mode` are vectorized; edge (i, j) is kept when either
    endpoint is among the other's k nearest in Euclidean distance, with
    weight exp(-phi * d_ij^2). phi="auto" uses 1 / median(d^2). When the
    k-NN graph is disconnected, minimum-spanning-tree edges of the full
    distance graph are added so the fusion graph is always connected.
    """
    X = unfold(np.asarray(data, dtype=np.float64), mode)
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least two slices along the mode")
    k = int(k)
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < {n}, got {k}")

    d2_condensed = pdist(X, metric="sqeuclidean")
    d2 = squareform(d2_condensed)
    if phi in ("auto", None):
        med = float(np.median(d2_condensed))
        phi = 1.0 / med if med > 0.0 else 0.0
    phi = float(phi)
    if not (np.isfinite(phi) and phi >= 0.0):
        raise ValueError(f"phi must be finite and >= 0, got {phi}")

    pairs = set()
    for i in range(n):
        order = np.argsort(d2[i], kind="stable")
        picked = 0
        for j in order:
            if j == i:
                continue
            pairs.add((min(i, j), max(i, j)))
            picked += 1
            if picked == k:
                break

    if _n_components(n, pairs) > 1:
        # +1 shifts all weights of the complete graph equally, so the MST is
        # the MST of the true distances while zero distances stay usable.
        tree = minimum_spanning_tree(d2 + 1.0)
        merged = DisjointSet(range(n))
        for i, j in pairs:
            merged.merge(i, j)
        bridges = sorted(
            (min(i, j), max(i, j)) for i, j in zip(*tree.nonzero())
        )
        for i, j in bridges:
            if merged.merge(i, j):
                pairs.add((i, j))

    edges = [(i, j, float(np.exp(-phi * d2[i, j]))) for i, j in sorted(pairs)]
    return WeightGraph(n_vertices=n, edges=tuple(edges))


def uniform_weights(n_vertices):
    """Complete graph with unit weights (the dense fallback scheme)."""
    edges = tuple(
        (i, j, 1.0) for i in range(n_vertices) for j in range(i + 1, n_vertices)
    )
    return WeightGraph(n_vertices=n_vertices, edges=edges)


def _n_components(n, pairs):
    if not pairs:
        return n
    heads, tails = zip(*pairs)
    adj = sp.coo_array(
        (np.ones(len(pairs)), (np.array(heads), np.array(tails))), shape=(n, n)
    )
    ncomp, _ = connected_components(adj, directed=False)
    return ncomp


def extract_clusters(state, inst, tol=0.0):
    """Cluster labels from the exact zeros of the per-mode copy variables.

    Edge e of mode j is fused when ||V_j[e]||_q <= tol (default 0: the prox
    produces exact zeros); labels are the connected components of the fused
    edges. Works for matrix and tensor solver states alike.
    """
    tol = max(float(tol), 0.0)
    group_stacks = state.mode_copy_groups()
    if len(group_stacks) != len(inst.mode_graphs):
        raise ValueError("state and instance disagree on the number of modes")
    labels, counts = [], []
    for graph, stack in zip(inst.mode_graphs, group_stacks):
        if stack.shape[0] != graph.n_edges:
            raise ValueError(
                f"state has {stack.shape[0]} copy groups for a "
                f"{graph.n_edges}-edge graph"
            )
        n = graph.n_vertices
        heads, tails = graph.endpoint_arrays()
        fused = group_norms(stack, inst.q) <= tol
        adj = sp.coo_array(
            (np.ones(int(fused.sum())), (heads[fused], tails[fused])),
            shape=(n, n),
        )
        ncomp, lab = connected_components(adj, directed=False)
        labels.append(lab.astype(np.intp))
        counts.append(int(ncomp))
    return ClusterAssignment(
        labels_per_mode=tuple(labels), n_clusters_per_mode=tuple(counts)
    )
