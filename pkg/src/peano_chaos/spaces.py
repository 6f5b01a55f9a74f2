"""The golden spaces used throughout the tests and demos."""

from .metric_graph import MetricGraph


def interval() -> MetricGraph:
    return MetricGraph(["a", "b"], [("e0", "a", "b", 1)])


def circle() -> MetricGraph:
    return MetricGraph(["a", "b"], [("e0", "a", "b", "1/2"), ("e1", "b", "a", "1/2")])


def triod() -> MetricGraph:
    return MetricGraph(
        ["o", "a", "b", "c"],
        [("e0", "o", "a", 1), ("e1", "o", "b", 1), ("e2", "o", "c", 1)],
    )


def theta() -> MetricGraph:
    return MetricGraph(
        ["a", "b"],
        [("e0", "a", "b", "1/2"), ("e1", "a", "b", "1/2"), ("e2", "a", "b", "1/2")],
    )


def figure_eight() -> MetricGraph:
    return MetricGraph(["o"], [("e0", "o", "o", "1/2"), ("e1", "o", "o", "1/2")])


def tree7() -> MetricGraph:
    # a spine with two side branches: 8 vertices, 7 edges
    return MetricGraph(
        ["v0", "v1", "v2", "v3", "v4", "v5", "v6", "v7"],
        [
            ("e0", "v0", "v1", "1/4"),
            ("e1", "v1", "v2", "1/4"),
            ("e2", "v2", "v3", "1/4"),
            ("e3", "v1", "v4", "1/4"),
            ("e4", "v2", "v5", "1/4"),
            ("e5", "v5", "v6", "1/4"),
            ("e6", "v5", "v7", "1/4"),
        ],
    )


GOLDEN = {
    "interval": interval,
    "circle": circle,
    "triod": triod,
    "theta": theta,
    "figure8": figure_eight,
    "tree7": tree7,
}
