import numpy as np
import pytest

from linkpred.errors import ConfigError
from linkpred.graph import graph_stats, load_graph
from linkpred.synthetic import (
    make_benchmark_network,
    powerlaw_cluster_edges,
    synthesize_attributes,
    write_attribute_file,
    write_edge_file,
)


class TestEdgeGenerator:
    def test_simple_graph_invariants(self):
        edges = powerlaw_cluster_edges(200, attach=4, triangle_prob=0.7, seed=0)
        assert all(u < v for u, v in edges)
        assert len(edges) == len(set(edges))
        assert all(0 <= u < 200 and 0 <= v < 200 for u, v in edges)
        # each arriving node makes `attach` connections; a closure edge that
        # collides with a queued target deduplicates, so allow slight shrink
        cap = (200 - 4) * 4
        assert 0.97 * cap <= len(edges) <= cap

    def test_triangle_prob_raises_clustering(self):
        low = make_benchmark_network(n=500, attach=4, triangle_prob=0.0, seed=1)
        high = make_benchmark_network(n=500, attach=4, triangle_prob=0.9, seed=1)
        assert graph_stats(high).C > graph_stats(low).C + 0.1

    def test_deterministic_in_seed(self):
        a = powerlaw_cluster_edges(150, 3, 0.5, seed=7)
        b = powerlaw_cluster_edges(150, 3, 0.5, seed=7)
        c = powerlaw_cluster_edges(150, 3, 0.5, seed=8)
        assert a == b
        assert a != c

    def test_heavy_tail_degrees(self):
        g = make_benchmark_network(n=800, attach=3, triangle_prob=0.5, seed=2)
        degs = g.degrees
        assert degs.max() > 5 * np.median(degs)

    def test_parameter_validation(self):
        with pytest.raises(ConfigError):
            powerlaw_cluster_edges(10, attach=0, triangle_prob=0.5, seed=0)
        with pytest.raises(ConfigError):
            powerlaw_cluster_edges(10, attach=10, triangle_prob=0.5, seed=0)
        with pytest.raises(ConfigError):
            powerlaw_cluster_edges(10, attach=2, triangle_prob=1.5, seed=0)


class TestAttributes:
    def test_shape_and_ranges(self):
        attrs = synthesize_attributes(400, seed=0)
        assert attrs.shape == (400, 7)
        assert attrs.min() >= 0
        years = attrs[:, 5]
        known = years[years != 0]
        assert known.min() >= 2003 and known.max() <= 2008

    def test_each_column_has_values_and_missingness(self):
        attrs = synthesize_attributes(600, seed=3)
        for col in (0, 2, 3, 4, 5, 6):
            assert (attrs[:, col] == 0).any(), f"column {col} never missing"
            assert (attrs[:, col] != 0).any(), f"column {col} always missing"

    def test_deterministic(self):
        assert np.array_equal(synthesize_attributes(100, seed=5), synthesize_attributes(100, seed=5))


class TestBenchmarkNetwork:
    def test_default_clustering_in_target_band(self):
        g = make_benchmark_network(n=1500, seed=0)
        c = graph_stats(g).C
        assert 0.2 < c < 0.4

    def test_network_id_attached(self):
        g = make_benchmark_network(n=100, attach=3, seed=1, network_id="bench01")
        assert g.network_id == "bench01"

    def test_file_round_trip(self, tmp_path):
        g = make_benchmark_network(n=120, attach=3, seed=4, network_id="rt")
        edge_path = tmp_path / "rt.edges"
        attr_path = tmp_path / "rt.attrs.csv"
        write_edge_file(edge_path, g, comment="benchmark network")
        write_attribute_file(attr_path, g)
        back = load_graph(edge_path, attr_path, network_id="rt")
        assert back.node_count == g.node_count
        assert back.edge_set == g.edge_set
        assert np.array_equal(back.attributes, g.attributes)
