"""Neighbor-based pair similarity scores: JC, AA, PA, RAI."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError
from .graph import AttributedGraph


@dataclass(frozen=True)
class PairScore:
    u: int
    v: int
    jc: float
    aa: float
    pa: float
    rai: float


def _checked_pair(g: AttributedGraph, u: int, v: int):
    u, v = g.check_node(u), g.check_node(v)
    if u == v:
        raise DomainError(f"pair metrics undefined for identical nodes ({u},{u})")
    return u, v


def _common_neighbors(g: AttributedGraph, u: int, v: int) -> np.ndarray:
    return np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True)


def jaccard(g: AttributedGraph, u: int, v: int) -> float:
    """|Γ(u) ∩ Γ(v)| / |Γ(u) ∪ Γ(v)|; 0 when both neighborhoods are empty."""
    u, v = _checked_pair(g, u, v)
    inter = _common_neighbors(g, u, v).size
    union = g.degree(u) + g.degree(v) - inter
    return inter / union if union else 0.0


def adamic_adar(g: AttributedGraph, u: int, v: int) -> float:
    """Sum over common neighbors z of 1 / ln(deg z)."""
    u, v = _checked_pair(g, u, v)
    common = _common_neighbors(g, u, v)
    if common.size == 0:
        return 0.0
    degs = g.degrees[common]
    # a common neighbor of two distinct nodes always has degree >= 2
    assert np.all(degs >= 2), "common neighbor with degree < 2 in a simple graph"
    return float(np.sum(1.0 / np.log(degs)))


def preferential_attachment(g: AttributedGraph, u: int, v: int) -> float:
    u, v = _checked_pair(g, u, v)
    return float(g.degree(u) * g.degree(v))


def resource_allocation(g: AttributedGraph, u: int, v: int) -> float:
    """Sum over common neighbors z of 1 / deg(z)."""
    u, v = _checked_pair(g, u, v)
    common = _common_neighbors(g, u, v)
    if common.size == 0:
        return 0.0
    return float(np.sum(1.0 / g.degrees[common]))


def score_pairs(g: AttributedGraph, pairs) -> list[PairScore]:
    """All four metrics for each pair, sharing one neighborhood intersection.

    Output order matches the input; the first invalid pair aborts with its
    index. Scoring is independent per pair, so results do not depend on any
    internal batching.
    """
    out = []
    for i, (u, v) in enumerate(pairs):
        try:
            u, v = _checked_pair(g, u, v)
        except DomainError as exc:
            raise DomainError(f"pair {i}: {exc}") from None
        common = _common_neighbors(g, u, v)
        du, dv = g.degree(u), g.degree(v)
        union = du + dv - common.size
        if common.size:
            degs = g.degrees[common]
            assert np.all(degs >= 2)
            aa = float(np.sum(1.0 / np.log(degs)))
            rai = float(np.sum(1.0 / degs))
        else:
            aa = rai = 0.0
        out.append(
            PairScore(
                u=u,
                v=v,
                jc=common.size / union if union else 0.0,
                aa=aa,
                pa=float(du * dv),
                rai=rai,
            )
        )
    return out


def write_pair_scores(path, scores) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "jc", "aa", "pa", "rai"])
        for s in scores:
            writer.writerow([s.u, s.v, repr(s.jc), repr(s.aa), repr(s.pa), repr(s.rai)])
