import numpy as np
import pytest

from linkpred.dataset import FeatureMatrix
from linkpred.graph import ATTRIBUTE_HEADER, AttributedGraph


@pytest.fixture
def wedge_graph():
    """Edges {(0,1),(0,2),(1,2),(3 attached to 2)}: a triangle with a tail.

    Degrees are [2, 2, 3, 1]; node 2 is the only common neighbor of the
    pair (0, 3).
    """
    return AttributedGraph(4, [(0, 1), (0, 2), (1, 2), (2, 3)], network_id="wedge")


def random_graph(rng, n, p=0.4, network_id="rand"):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return AttributedGraph(n, edges, network_id=network_id)


def make_matrix(rows, labels, columns=None, kind="baseline", partition="train"):
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[:, None]
    if columns is None:
        columns = tuple(f"f{i}" for i in range(rows.shape[1]))
    return FeatureMatrix(
        column_names=tuple(columns),
        rows=rows,
        labels=np.asarray(labels, dtype=np.int64),
        dataset_kind=kind,
        partition=partition,
    )


def central_diff(fun, x, eps=1e-6):
    """Central finite-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi.flat[i] += eps
        lo.flat[i] -= eps
        grad.flat[i] = (fun(hi) - fun(lo)) / (2.0 * eps)
    return grad


def rel_err(a, b):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    denom = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / denom)


def write_network_files(tmp_path, g, stem):
    """Dump a graph in the on-disk format the loader expects."""
    edge_path = tmp_path / f"{stem}.edges"
    attr_path = tmp_path / f"{stem}.attrs.csv"
    with edge_path.open("w") as fh:
        for u, v in g.edges():
            fh.write(f"{g.original_ids[u]} {g.original_ids[v]}\n")
    with attr_path.open("w") as fh:
        fh.write(",".join(ATTRIBUTE_HEADER) + "\n")
        for node in range(g.node_count):
            row = [g.original_ids[node]] + [str(int(x)) for x in g.attributes[node]]
            fh.write(",".join(row) + "\n")
    return edge_path, attr_path
