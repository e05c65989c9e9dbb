"""Command-line front end: data I/O, solver runs, synthesis, benchmarking.

Verbs:
  run      solve one instance; write trace, cluster assignments, solution
  bench    run every algorithm on the identical instance; emit a report
  synth    generate checkerboard data with ground-truth labels
  weights  emit a fusion weight-graph file ("i,j,w" lines)

Exit codes: 0 success, 1 non-convergence or divergence, 2 input error.
"""

import argparse
import csv
import hashlib
import sys
from dataclasses import dataclass

import numpy as np

from .model import (
    ProblemInstance,
    WeightGraph,
    extract_clusters,
    gaussian_knn_weights,
    uniform_weights,
)
from .solvers import ALGORITHMS, DivergenceError, SolverParams, solve
from .tensorcc import tensor_solve

FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# loaders / writers


def _try_float(cell):
    try:
        return float(cell)
    except ValueError:
        return None


def load_matrix_csv(path):
    """Dense matrix from CSV; optional single header row is auto-detected."""
    data = []
    header_skipped = False
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for rec in reader:
            line = reader.line_num
            if not rec:
                continue
            vals = [_try_float(c) for c in rec]
            bad = [idx for idx, v in enumerate(vals) if v is None]
            if bad:
                if not data and not header_skipped:
                    header_skipped = True
                    continue
                raise ValueError(
                    f"{path}: cannot parse value at line {line}, column {bad[0] + 1}"
                )
            data.append((line, vals))
    if not data:
        raise ValueError(f"{path}: no numeric rows")
    ncols = len(data[0][1])
    for line, vals in data:
        if len(vals) != ncols:
            raise ValueError(
                f"{path}: ragged row at line {line} "
                f"(expected {ncols} values, got {len(vals)})"
            )
    return np.array([vals for _, vals in data], dtype=np.float64)


def save_matrix_csv(path, M):
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.asarray(M):
            fh.write(",".join(FLOAT_FMT % v for v in row) + "\n")


def load_tensor(path):
    """Dense tensor from the text format "tensor J n1 ... nJ" + values."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        body = fh.read().split()
    if len(header) < 2 or header[0] != "tensor":
        raise ValueError(f"{path}: malformed tensor header")
    try:
        order = int(header[1])
        dims = [int(t) for t in header[2:]]
    except ValueError:
        raise ValueError(f"{path}: malformed tensor header") from None
    if len(dims) != order or order < 1 or any(d < 1 for d in dims):
        raise ValueError(f"{path}: malformed tensor header")
    expected = int(np.prod(dims))
    if len(body) != expected:
        raise ValueError(
            f"{path}: expected {expected} values, got {len(body)}"
        )
    try:
        vals = [float(t) for t in body]
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None
    return np.array(vals, dtype=np.float64).reshape(dims)


def save_tensor(path, T):
    T = np.asarray(T)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("tensor %d %s\n" % (T.ndim, " ".join(str(d) for d in T.shape)))
        for row in T.reshape(-1, T.shape[-1]):
            fh.write(" ".join(FLOAT_FMT % v for v in row) + "\n")


def load_weight_graph(path, n_vertices):
    """Weight graph from "i,j,w" lines."""
    edges = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for rec in reader:
            if not rec:
                continue
            if len(rec) != 3:
                raise ValueError(
                    f"{path}: line {reader.line_num}: expected 'i,j,w'"
                )
            try:
                edges.append((int(rec[0]), int(rec[1]), float(rec[2])))
            except ValueError:
                raise ValueError(
                    f"{path}: line {reader.line_num}: expected 'i,j,w'"
                ) from None
    return WeightGraph(n_vertices=n_vertices, edges=tuple(edges))


def save_weight_graph(path, graph):
    with open(path, "w", encoding="utf-8") as fh:
        for i, j, w in graph.edges:
            fh.write("%d,%d,%s\n" % (i, j, FLOAT_FMT % w))


def write_trace_csv(path, trace):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(trace.HEADER) + "\n")
        for it, el, obj, pr, du in trace.rows():
            fh.write(
                "%d,%.6f,%s,%s,%s\n"
                % (it, el, FLOAT_FMT % obj, FLOAT_FMT % pr, FLOAT_FMT % du)
            )


def write_assignments_csv(path, assignment):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("mode,index,cluster\n")
        for mode, labels in enumerate(assignment.labels_per_mode):
            for idx, lab in enumerate(labels):
                fh.write("%d,%d,%d\n" % (mode, idx, lab))


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    """One solver invocation, as assembled from the command line."""

    input: str | None
    tensor: str | None
    algorithm: str
    lam: float
    q: float
    rho: float | None
    alpha: float | None
    tol: float
    max_iter: int
    accelerate: bool
    weights: str
    k: int
    phi: str
    weights_file: tuple
    seed: int
    trace_out: str | None = None
    assign_out: str | None = None
    solution_out: str | None = None

    @classmethod
    def from_args(cls, args):
        return cls(
            input=args.input,
            tensor=args.tensor,
            algorithm=getattr(args, "algorithm", "admm"),
            lam=args.lam,
            q=_parse_q(args.q),
            rho=args.rho,
            alpha=args.alpha,
            tol=args.tol,
            max_iter=args.max_iter,
            accelerate=args.accelerate,
            weights=args.weights,
            k=args.k,
            phi=args.phi,
            weights_file=tuple(args.weights_file or ()),
            seed=args.seed,
            trace_out=getattr(args, "trace_out", None),
            assign_out=getattr(args, "assign_out", None),
            solution_out=getattr(args, "solution_out", None),
        )


def _parse_q(q):
    if isinstance(q, str):
        q = q.strip().lower()
        if q == "inf":
            return float("inf")
    return float(q)


def _load_data(config):
    if (config.input is None) == (config.tensor is None):
        raise ValueError("exactly one of --input and --tensor is required")
    if config.input is not None:
        return load_matrix_csv(config.input), False
    return load_tensor(config.tensor), True


def _build_graphs(data, config):
    graphs = []
    for mode in range(data.ndim):
        if config.weights == "knn-gaussian":
            phi = config.phi if config.phi == "auto" else float(config.phi)
            graphs.append(gaussian_knn_weights(data, mode, k=config.k, phi=phi))
        elif config.weights == "uniform":
            graphs.append(uniform_weights(data.shape[mode]))
        elif config.weights == "file":
            if len(config.weights_file) != data.ndim:
                raise ValueError(
                    f"--weights file needs {data.ndim} --weights-file paths "
                    f"(one per mode), got {len(config.weights_file)}"
                )
            graphs.append(
                load_weight_graph(config.weights_file[mode], data.shape[mode])
            )
        else:
            raise ValueError(f"unknown weight scheme {config.weights!r}")
    return tuple(graphs)


def _solver_params(config):
    rho = 1.0 if config.rho is None else config.rho
    dy_policy = "auto" if config.rho is None else config.rho
    return SolverParams(
        rho=rho,
        alpha=config.alpha,
        max_iter=config.max_iter,
        tol=config.tol,
        accelerate=config.accelerate,
        dy_step_policy=dy_policy,
    )


def _run_algorithm(inst, algorithm, params, is_tensor):
    if is_tensor:
        return tensor_solve(inst, algorithm, params)
    return solve(inst, algorithm, params)


def _data_digest(data):
    return hashlib.sha256(np.ascontiguousarray(data).tobytes()).hexdigest()


# ---------------------------------------------------------------------------
# verbs


def run(config):
    """Solve one instance and write the requested artifacts."""
    data, is_tensor = _load_data(config)
    if is_tensor and config.algorithm == "cobra":
        raise ValueError("cobra is defined for matrix data only")
    graphs = _build_graphs(data, config)
    inst = ProblemInstance(data, graphs, config.lam, config.q)
    params = _solver_params(config)
    state, trace = _run_algorithm(inst, config.algorithm, params, is_tensor)

    if config.trace_out:
        write_trace_csv(config.trace_out, trace)
    assignment = extract_clusters(state, inst)
    if config.assign_out:
        write_assignments_csv(config.assign_out, assignment)
    if config.solution_out:
        if is_tensor:
            save_tensor(config.solution_out, state.U)
        else:
            save_matrix_csv(config.solution_out, state.U)

    clusters = ",".join(str(c) for c in assignment.n_clusters_per_mode)
    print(
        f"algorithm={config.algorithm} iterations={state.iterations} "
        f"converged={state.converged} objective={trace.final_objective:.10g} "
        f"clusters={clusters} seed={config.seed}"
    )
    return 0 if state.converged else 1


@dataclass
class BenchRow:
    algorithm: str
    iter_per_sec: float
    total_seconds: float
    total_iterations: int
    final_objective: float
    converged: bool
    inner_iterations: int | None = None
    error: str | None = None


@dataclass
class BenchReport:
    data_sha256: str
    rows: list


BENCH_HEADER = (
    "algorithm,iter_per_sec,total_seconds,total_iterations,"
    "final_objective,converged,inner_iterations,data_sha256"
)


def bench(config, trace_dir=None, report_out=None):
    """Run every algorithm on the identical instance under one stopping rule."""
    data, is_tensor = _load_data(config)
    digest = _data_digest(data)
    graphs = _build_graphs(data, config)
    inst = ProblemInstance(data, graphs, config.lam, config.q)
    algorithms = [a for a in ALGORITHMS if not (is_tensor and a == "cobra")]
    variants = [(a, False) for a in algorithms]
    if config.accelerate:
        variants += [(a, True) for a in algorithms]

    rows = []
    for algorithm, accel in variants:
        name = algorithm + ("-accel" if accel else "")
        params = _solver_params(config)
        params.accelerate = accel
        try:
            state, trace = _run_algorithm(inst, algorithm, params, is_tensor)
        except (DivergenceError, ValueError) as err:
            rows.append(
                BenchRow(name, float("nan"), float("nan"), 0, float("nan"),
                         False, None, str(err))
            )
            print(f"{name}: failed ({err})", file=sys.stderr)
            continue
        total = trace.elapsed_s[-1]
        rows.append(
            BenchRow(
                algorithm=name,
                iter_per_sec=state.iterations / total if total > 0 else float("inf"),
                total_seconds=total,
                total_iterations=state.iterations,
                final_objective=trace.final_objective,
                converged=state.converged,
                inner_iterations=state.inner_iterations
                if hasattr(state, "inner_iterations")
                else None,
            )
        )
        if trace_dir:
            write_trace_csv(f"{trace_dir}/trace_{name}.csv", trace)

    report = BenchReport(data_sha256=digest, rows=rows)
    print(f"data sha256: {digest}")
    print("algorithm iter/sec total_s iterations objective converged")
    for r in rows:
        inner = f" (inner {r.inner_iterations})" if r.inner_iterations else ""
        print(
            f"{r.algorithm} {r.iter_per_sec:.3f} {r.total_seconds:.3f} "
            f"{r.total_iterations}{inner} {r.final_objective:.10g} {r.converged}"
        )
    if report_out:
        with open(report_out, "w", encoding="utf-8") as fh:
            fh.write(BENCH_HEADER + "\n")
            for r in rows:
                inner = "" if r.inner_iterations is None else str(r.inner_iterations)
                fh.write(
                    "%s,%s,%s,%d,%s,%s,%s,%s\n"
                    % (
                        r.algorithm,
                        FLOAT_FMT % r.iter_per_sec,
                        FLOAT_FMT % r.total_seconds,
                        r.total_iterations,
                        FLOAT_FMT % r.final_objective,
                        int(r.converged),
                        inner,
                        digest,
                    )
                )
    return report


def synth(dims, blocks, noise_sd, seed, out, labels_out=None):
    """Checkerboard data: +/-2 block means on a grid plus Gaussian noise."""
    if len(dims) != len(blocks):
        raise ValueError("need one block count per dimension")
    if any(d < 1 for d in dims) or any(b < 1 for b in blocks):
        raise ValueError("dims and blocks must be positive")
    if any(b > d for d, b in zip(dims, blocks)):
        raise ValueError("more blocks than indices along a mode")
    if noise_sd < 0:
        raise ValueError("noise sd must be >= 0")
    labels = []
    for d, b in zip(dims, blocks):
        lab = np.zeros(d, dtype=np.intp)
        for block_id, chunk in enumerate(np.array_split(np.arange(d), b)):
            lab[chunk] = block_id
        labels.append(lab)
    parity = np.zeros(dims, dtype=np.intp)
    for j, lab in enumerate(labels):
        shape = [1] * len(dims)
        shape[j] = dims[j]
        parity = parity + lab.reshape(shape)
    signal = 2.0 * np.where(parity % 2 == 0, 1.0, -1.0)
    rng = np.random.default_rng(seed)
    data = signal + rng.normal(0.0, noise_sd, size=dims) if noise_sd > 0 else signal

    if len(dims) == 2:
        save_matrix_csv(out, data)
    else:
        save_tensor(out, data)
    if labels_out:
        for j, lab in enumerate(labels):
            with open(f"{labels_out}.mode{j}.csv", "w", encoding="utf-8") as fh:
                for v in lab:
                    fh.write("%d\n" % v)
    return data, labels


# ---------------------------------------------------------------------------
# argument parsing


def _add_data_args(p):
    p.add_argument("--input", help="matrix CSV path")
    p.add_argument("--tensor", help="tensor text-file path")


def _add_weight_args(p):
    p.add_argument(
        "--weights",
        choices=("knn-gaussian", "uniform", "file"),
        default="knn-gaussian",
        help="fusion weight scheme",
    )
    p.add_argument("--k", type=int, default=4, help="k-NN neighbor count")
    p.add_argument("--phi", default="auto", help="Gaussian kernel scale or 'auto'")
    p.add_argument(
        "--weights-file",
        action="append",
        help="weight graph file, one per mode (with --weights file)",
    )


def _add_solver_args(p, with_algorithm=True):
    if with_algorithm:
        p.add_argument("--algorithm", choices=ALGORITHMS, default="admm")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--q", choices=("1", "2", "inf"), default="2")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--accelerate", action="store_true")
    p.add_argument("--seed", type=int, default=0)


def _parse_dims(text):
    try:
        dims = tuple(int(t) for t in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"cannot parse dimension spec {text!r}") from None
    if not dims:
        raise ValueError(f"cannot parse dimension spec {text!r}")
    return dims


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coclust",
        description="Convex bi-clustering and tensor co-clustering solvers",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="solve one instance")
    _add_data_args(p_run)
    _add_solver_args(p_run)
    _add_weight_args(p_run)
    p_run.add_argument("--trace-out")
    p_run.add_argument("--assign-out")
    p_run.add_argument("--solution-out")
    p_run.set_defaults(func=_cmd_run)

    p_bench = sub.add_parser("bench", help="compare all algorithms")
    _add_data_args(p_bench)
    _add_solver_args(p_bench, with_algorithm=False)
    _add_weight_args(p_bench)
    p_bench.add_argument("--report-out")
    p_bench.add_argument("--trace-dir")
    p_bench.set_defaults(func=_cmd_bench)

    p_synth = sub.add_parser("synth", help="generate checkerboard data")
    p_synth.add_argument("--kind", choices=("checkerboard",), default="checkerboard")
    p_synth.add_argument("--dims", required=True, help="e.g. 40x30 or 6x5x4")
    p_synth.add_argument("--blocks", required=True, help="e.g. 2x2 or 2x2x2")
    p_synth.add_argument("--noise-sd", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--labels-out")
    p_synth.set_defaults(func=_cmd_synth)

    p_w = sub.add_parser("weights", help="emit a weight graph file")
    _add_data_args(p_w)
    _add_weight_args(p_w)
    p_w.add_argument("--mode", type=int, required=True)
    p_w.add_argument("--out", required=True)
    p_w.set_defaults(func=_cmd_weights)

    return parser


def _cmd_run(args):
    return run(RunConfig.from_args(args))


def _cmd_bench(args):
    config = RunConfig.from_args(args)
    bench(config, trace_dir=args.trace_dir, report_out=args.report_out)
    return 0


def _cmd_synth(args):
    dims = _parse_dims(args.dims)
    blocks = _parse_dims(args.blocks)
    synth(dims, blocks, args.noise_sd, args.seed, args.out, args.labels_out)
    print(f"wrote {args.out} dims={args.dims} blocks={args.blocks} seed={args.seed}")
    return 0


def _cmd_weights(args):
    if (args.input is None) == (args.tensor is None):
        raise ValueError("exactly one of --input and --tensor is required")
    data = load_matrix_csv(args.input) if args.input else load_tensor(args.tensor)
    if not 0 <= args.mode < data.ndim:
        raise ValueError(f"mode {args.mode} out of range for {data.ndim}-mode data")
    if args.weights == "knn-gaussian":
        phi = args.phi if args.phi == "auto" else float(args.phi)
        graph = gaussian_knn_weights(data, args.mode, k=args.k, phi=phi)
    elif args.weights == "uniform":
        graph = uniform_weights(data.shape[args.mode])
    else:
        raise ValueError("weights verb computes graphs; use knn-gaussian or uniform")
    save_weight_graph(args.out, graph)
    print(f"wrote {args.out}: {graph.n_edges} edges on {graph.n_vertices} vertices")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
