"""Second-order biased random walks with alias sampling.

A step from current node v with previous node t weights each candidate x by
1/p if x = t, 1 if x is adjacent to t, and 1/q otherwise; the first step of
a walk is uniform over the start node's neighbors. Alias tables are built
lazily per (prev, current) edge and cached, since walk simulation touches
the same transitions over and over.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .graph import AttributedGraph
from .rng import make_rng


@dataclass(frozen=True)
class WalkConfig:
    seed: int
    dimensions: int = 64
    walks_per_node: int = 50
    walk_length: int = 20
    return_p: float = 1.0
    in_out_q: float = 0.8
    window: int = 10
    negatives_per_positive: int = 5
    epochs: int = 5
    learning_rate: float = 0.025

    def __post_init__(self):
        if self.dimensions < 1:
            raise ConfigError(f"dimensions must be >= 1, got {self.dimensions}")
        if self.walk_length < 2:
            raise ConfigError(f"walk_length must be >= 2, got {self.walk_length}")
        if not self.return_p > 0:
            raise ConfigError(f"return_p must be positive, got {self.return_p}")
        if not self.in_out_q > 0:
            raise ConfigError(f"in_out_q must be positive, got {self.in_out_q}")
        if self.walks_per_node < 1 or self.window < 1 or self.epochs < 1:
            raise ConfigError("walks_per_node, window and epochs must all be >= 1")
        if self.negatives_per_positive < 1:
            raise ConfigError("negatives_per_positive must be >= 1")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")


@dataclass(frozen=True)
class Walk:
    nodes: tuple

    def __len__(self):
        return len(self.nodes)


def build_alias(weights):
    """Vose alias tables (prob, alias) for O(1) sampling of a finite law."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise DomainError("alias table needs a nonempty 1-D weight vector")
    total = w.sum()
    if (w < 0).any() or not total > 0:
        raise DomainError("alias weights must be nonnegative with positive sum")
    k = w.size
    prob = w * (k / total)
    alias = np.zeros(k, dtype=np.int64)
    small = [i for i in range(k) if prob[i] < 1.0]
    large = [i for i in range(k) if prob[i] >= 1.0]
    while small and large:
        s, g = small.pop(), large.pop()
        alias[s] = g
        prob[g] -= 1.0 - prob[s]
        (large if prob[g] >= 1.0 else small).append(g)
    for i in small + large:
        prob[i] = 1.0
    return prob, alias


def sample_alias(prob, alias, rng) -> int:
    i = int(rng.integers(prob.size))
    return i if rng.random() < prob[i] else int(alias[i])


def _step_weights(g, prev, cur, p, q):
    """Unnormalized transition weights out of cur given the walk came from prev."""
    nbrs = g.neighbors(cur)
    w = np.full(nbrs.shape, 1.0 / q)
    w[np.isin(nbrs, g.neighbors(prev), assume_unique=True)] = 1.0
    w[nbrs == prev] = 1.0 / p
    return nbrs, w


def _one_walk(g, cfg, start, rng, cache):
    nodes = [start]
    nbrs = g.neighbors(start)
    nodes.append(int(nbrs[rng.integers(nbrs.size)]))
    while len(nodes) < cfg.walk_length:
        prev, cur = nodes[-2], nodes[-1]
        if g.degree(cur) == 0:
            break
        key = (prev, cur)
        entry = cache.get(key)
        if entry is None:
            cand, w = _step_weights(g, prev, cur, cfg.return_p, cfg.in_out_q)
            prob, alias = build_alias(w)
            entry = (cand, prob, alias)
            cache[key] = entry
        cand, prob, alias = entry
        nodes.append(int(cand[sample_alias(prob, alias, rng)]))
    return nodes


def generate_walks(g: AttributedGraph, cfg: WalkConfig, report=None):
    """walks_per_node walks from every non-isolated node, deterministic in seed.

    Each walk draws from its own RNG stream keyed by (seed, start node, walk
    index), so generation order (or parallel scheduling) cannot change the
    result. Isolated nodes yield no walks and are listed in the report.
    """
    if g.node_count == 0:
        raise DomainError("cannot walk an empty graph")
    cache = {}
    walks = []
    isolated = []
    for node in range(g.node_count):
        if g.degree(node) == 0:
            isolated.append(node)
            continue
        for k in range(cfg.walks_per_node):
            rng = make_rng(cfg.seed, "walk", node, k)
            walks.append(Walk(tuple(_one_walk(g, cfg, node, rng, cache))))
    if report is not None:
        report["isolated_nodes"] = isolated
        report["walk_count"] = len(walks)
    return walks
