"""One soft decision tree: topology, probabilistic routing, mixture prediction.

Nodes are numbered breadth-first over a full binary tree of the given depth:
children of node ``n`` sit at ``2n+1`` and ``2n+2``.  The first ``num_splits``
indices are split nodes; node ``num_splits + j`` is leaf ``j``.  Each split
reads one backbone output unit through a sigmoid; the sigmoid value is the
probability of taking the LEFT branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError, ShapeError

# Branch probabilities are clamped to this band before the path products so
# no leaf ever gets exactly zero reach probability.
SPLIT_EPS = 1e-12


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable sigmoid clamped to [SPLIT_EPS, 1 - SPLIT_EPS]."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return np.clip(out, SPLIT_EPS, 1.0 - SPLIT_EPS)


@dataclass(frozen=True)
class TreeTopology:
    """Full binary tree of ``depth`` levels; ``split_feature[n]`` selects the
    backbone output unit feeding split node ``n``."""

    depth: int
    feature_dim: int
    split_feature: np.ndarray

    def __post_init__(self) -> None:
        if self.depth < 2:
            raise ConfigError(f"tree depth must be at least 2, got {self.depth}")
        if self.feature_dim < 1:
            raise ConfigError("feature_dim must be at least 1")
        sf = np.asarray(self.split_feature, dtype=np.intp)
        if sf.shape != (self.num_splits,):
            raise ShapeError(
                f"split_feature must have shape ({self.num_splits},), got {sf.shape}"
            )
        if sf.size and (sf.min() < 0 or sf.max() >= self.feature_dim):
            raise ConfigError("split_feature indices must lie in [0, feature_dim)")
        sf.flags.writeable = False
        object.__setattr__(self, "split_feature", sf)

    @property
    def num_splits(self) -> int:
        return 2 ** (self.depth - 1) - 1

    @property
    def num_leaves(self) -> int:
        return 2 ** (self.depth - 1)

    @property
    def num_nodes(self) -> int:
        return self.num_splits + self.num_leaves


def build_topology(depth: int, feature_dim: int, seed: int) -> TreeTopology:
    """Sample the split-to-feature map: without replacement when the feature
    vector is wide enough to cover every split, with replacement otherwise."""
    if depth < 2:
        raise ConfigError(f"tree depth must be at least 2, got {depth}")
    if feature_dim < 1:
        raise ConfigError("feature_dim must be at least 1")
    num_splits = 2 ** (depth - 1) - 1
    rng = np.random.default_rng(seed)
    replace = feature_dim < num_splits
    split_feature = rng.choice(feature_dim, size=num_splits, replace=replace)
    return TreeTopology(depth, feature_dim, split_feature.astype(np.intp))


def uniform_leaf_dist(num_leaves: int, num_thresholds: int) -> np.ndarray:
    """Initial leaf table: every threshold probability at 1/2."""
    return np.full((num_leaves, num_thresholds), 0.5)


@dataclass
class Routing:
    """Leaf reach probabilities plus the cached per-split sigmoid activations.

    Arrays carry a leading batch axis: ``leaf_prob`` is (B, num_leaves) and
    ``split_prob`` is (B, num_splits).
    """

    leaf_prob: np.ndarray
    split_prob: np.ndarray


def route_batch(features: np.ndarray, topo: TreeTopology) -> Routing:
    """Soft-route a (B, feature_dim) batch down the tree.

    A leaf's probability is the product of sigmoid branch probabilities along
    its root path (left factor ``s``, right factor ``1 - s``), accumulated
    top-down over the implicit node array.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != topo.feature_dim:
        raise ShapeError(
            f"expected features of shape (batch, {topo.feature_dim}), "
            f"got {features.shape}"
        )
    if not np.all(np.isfinite(features)):
        raise NumericError("non-finite feature values in routing input")
    split_prob = sigmoid(features[:, topo.split_feature])
    batch = features.shape[0]
    node_prob = np.empty((batch, topo.num_nodes))
    node_prob[:, 0] = 1.0
    for n in range(topo.num_splits):
        node_prob[:, 2 * n + 1] = node_prob[:, n] * split_prob[:, n]
        node_prob[:, 2 * n + 2] = node_prob[:, n] * (1.0 - split_prob[:, n])
    return Routing(node_prob[:, topo.num_splits :], split_prob)


def route(features: np.ndarray, topo: TreeTopology) -> Routing:
    """Single-sample routing; arrays come back 1-D."""
    r = route_batch(np.asarray(features, dtype=float)[None, :], topo)
    return Routing(r.leaf_prob[0], r.split_prob[0])


def predict(routing: Routing, leaf_dist: np.ndarray) -> np.ndarray:
    """Mixture prediction: reach-probability weighted average of the leaf
    tables; entries stay in [0, 1] because the weights are a distribution."""
    leaf_dist = np.asarray(leaf_dist, dtype=np.float64)
    if routing.leaf_prob.shape[-1] != leaf_dist.shape[0]:
        raise ShapeError(
            f"routing has {routing.leaf_prob.shape[-1]} leaves but the leaf "
            f"table has {leaf_dist.shape[0]} rows"
        )
    return routing.leaf_prob @ leaf_dist


@dataclass
class NodeSums:
    """Per-node reach-weighted leaf sums, both channels, for all node indices.

    ``pos[..., n, k]`` is the sum of ``leaf_prob * leaf_dist[:, k]`` over the
    leaves under node ``n``; ``neg`` uses ``1 - leaf_dist``.  By construction
    a split node's entry equals the sum of its two children's entries, and the
    root entry is the full-tree mixture.
    """

    pos: np.ndarray
    neg: np.ndarray


def subtree_partials_batch(
    routing: Routing, leaf_dist: np.ndarray, topo: TreeTopology
) -> NodeSums:
    leaf_dist = np.asarray(leaf_dist, dtype=np.float64)
    leaf_prob = routing.leaf_prob
    if leaf_prob.ndim != 2:
        raise ShapeError("subtree_partials_batch expects batched routing")
    batch = leaf_prob.shape[0]
    width = leaf_dist.shape[1]
    pos = np.empty((batch, topo.num_nodes, width))
    neg = np.empty((batch, topo.num_nodes, width))
    pos[:, topo.num_splits :, :] = leaf_prob[:, :, None] * leaf_dist[None, :, :]
    neg[:, topo.num_splits :, :] = leaf_prob[:, :, None] * (1.0 - leaf_dist)[None, :, :]
    for n in range(topo.num_splits - 1, -1, -1):
        pos[:, n] = pos[:, 2 * n + 1] + pos[:, 2 * n + 2]
        neg[:, n] = neg[:, 2 * n + 1] + neg[:, 2 * n + 2]
    return NodeSums(pos, neg)


def subtree_partials(
    routing: Routing, leaf_dist: np.ndarray, topo: TreeTopology
) -> NodeSums:
    """Single-sample subtree sums (node-indexed arrays, no batch axis)."""
    batched = Routing(
        np.atleast_2d(routing.leaf_prob), np.atleast_2d(routing.split_prob)
    )
    sums = subtree_partials_batch(batched, leaf_dist, topo)
    return NodeSums(sums.pos[0], sums.neg[0])
