import numpy as np
import pytest

from src.conf.exceptions import BudgetException, DatasetFormatException
from src.schemas.datasets import GraphData, LabeledDataset
from src.services.generate import class_means, gen_mixture
from src.services.graph import normalized_adjacency, propagate_graph


def triangle() -> GraphData:
    nodes = LabeledDataset(features=np.eye(3), labels=[0, 1, 2])
    return GraphData(nodes=nodes, edges=[[0, 1], [1, 2], [2, 0]])


def test_propagate_graph_with_zero_hops_keeps_features():
    graph = triangle()
    propagated = propagate_graph(graph, hops=0)
    np.testing.assert_array_equal(propagated.features, graph.nodes.features)
    np.testing.assert_array_equal(propagated.labels, graph.nodes.labels)


def test_propagate_graph_over_a_triangle_averages_the_nodes():
    propagated = propagate_graph(triangle(), hops=1)
    np.testing.assert_allclose(propagated.features, np.full((3, 3), 1 / 3))


def test_propagate_graph_keeps_isolated_nodes():
    nodes = LabeledDataset(features=[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], labels=[0, 1, 0])
    graph = GraphData(nodes=nodes, edges=np.zeros((0, 2)))
    propagated = propagate_graph(graph, hops=3)
    np.testing.assert_allclose(propagated.features, nodes.features)


def test_normalized_adjacency_ignores_duplicates_and_self_loops():
    adjacency = normalized_adjacency(2, np.array([[0, 1], [1, 0], [0, 1], [1, 1]])).toarray()
    np.testing.assert_allclose(adjacency, np.full((2, 2), 0.5))


def test_normalized_adjacency_with_dangling_edge_raises_exception():
    with pytest.raises(DatasetFormatException, match="line 2"):
        normalized_adjacency(2, np.array([[0, 2]]))


def test_gen_mixture_is_balanced():
    data = gen_mixture(classes=3, per_class=1000, dim=4, separation=5.0, seed=0)
    assert data.n_records == 3000
    assert data.n_features == 4
    assert data.class_counts() == {0: 1000, 1: 1000, 2: 1000}


def test_gen_mixture_is_deterministic():
    first = gen_mixture(classes=2, per_class=10, dim=2, separation=3.0, seed=8)
    second = gen_mixture(classes=2, per_class=10, dim=2, separation=3.0, seed=8)
    third = gen_mixture(classes=2, per_class=10, dim=2, separation=3.0, seed=9)
    np.testing.assert_array_equal(first.features, second.features)
    assert not np.array_equal(first.features, third.features)


@pytest.mark.parametrize("classes, dim", ((3, 1), (3, 5), (6, 2), (2, 2)))
def test_class_means_closest_pair_is_the_separation(classes, dim):
    means = class_means(classes, dim, separation=4.0)
    gaps = [np.linalg.norm(means[i] - means[j]) for i in range(classes) for j in range(i + 1, classes)]
    assert min(gaps) == pytest.approx(4.0)


def test_class_means_without_separation_coincide():
    np.testing.assert_array_equal(class_means(4, 3, 0.0), np.zeros((4, 3)))


@pytest.mark.parametrize(
    "kwargs",
    (
        {"classes": 0, "per_class": 5, "dim": 2, "separation": 1.0},
        {"classes": 2, "per_class": 0, "dim": 2, "separation": 1.0},
        {"classes": 2, "per_class": 5, "dim": 0, "separation": 1.0},
        {"classes": 2, "per_class": 5, "dim": 2, "separation": -1.0},
    ),
)
def test_gen_mixture_with_invalid_arguments_raises_exception(kwargs):
    with pytest.raises(BudgetException):
        gen_mixture(seed=0, **kwargs)
