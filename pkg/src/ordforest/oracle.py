"""Brute-force reference implementations backing the test suite and the
gradcheck command.

Everything here is written as literal loops, independent of the vectorized
paths it cross-checks.  Slow on purpose; use only on small instances.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import NumericError
from .tree import Routing, TreeTopology, sigmoid


def fd_grad(
    loss_fn: Callable[[np.ndarray], float], params: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient estimate, one coordinate at a time.

    For each coordinate i of ``params`` this evaluates
    ``(loss(p + h e_i) - loss(p - h e_i)) / (2 h)``.
    """
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    params = np.asarray(params, dtype=np.float64)
    grad = np.empty_like(params)
    work = params.copy()
    for i in range(params.size):
        work[i] = params[i] + h
        up = loss_fn(work)
        work[i] = params[i] - h
        down = loss_fn(work)
        work[i] = params[i]
        if not (np.isfinite(up) and np.isfinite(down)):
            raise NumericError(f"non-finite loss at perturbation of coordinate {i}")
        grad[i] = (up - down) / (2.0 * h)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """Norm-ratio relative error between two gradient vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = max(np.linalg.norm(a), np.linalg.norm(b))
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(a - b) / denom)


def _leaf_path(topo: TreeTopology, leaf: int) -> list[tuple[int, bool]]:
    """Root-to-leaf path as (split node, went_left) pairs."""
    node = topo.num_splits + leaf
    path = []
    while node > 0:
        parent = (node - 1) // 2
        path.append((parent, node == 2 * parent + 1))
        node = parent
    path.reverse()
    return path


def route_by_paths(features: np.ndarray, topo: TreeTopology) -> np.ndarray:
    """Leaf reach probabilities via an explicit per-leaf walk, multiplying the
    sigmoid (left) or its complement (right) at every ancestor."""
    features = np.asarray(features, dtype=np.float64)
    s = sigmoid(features[topo.split_feature])
    probs = np.empty(topo.num_leaves)
    for leaf in range(topo.num_leaves):
        p = 1.0
        for node, went_left in _leaf_path(topo, leaf):
            p *= s[node] if went_left else (1.0 - s[node])
        probs[leaf] = p
    return probs


def predict_naive(leaf_prob: np.ndarray, leaf_dist: np.ndarray) -> np.ndarray:
    """Mixture prediction by direct double summation."""
    num_leaves, width = np.asarray(leaf_dist).shape
    out = np.zeros(width)
    for k in range(width):
        for leaf in range(num_leaves):
            out[k] += leaf_prob[leaf] * leaf_dist[leaf, k]
    return out


def leaves_under(topo: TreeTopology, node: int) -> list[int]:
    """Leaf indices in the subtree rooted at an arbitrary node index."""
    if node >= topo.num_splits:
        return [node - topo.num_splits]
    return leaves_under(topo, 2 * node + 1) + leaves_under(topo, 2 * node + 2)


def subtree_sums_naive(
    leaf_prob: np.ndarray, leaf_dist: np.ndarray, topo: TreeTopology
) -> tuple[np.ndarray, np.ndarray]:
    """Per-node channel sums recomputed from scratch for every node."""
    width = np.asarray(leaf_dist).shape[1]
    pos = np.zeros((topo.num_nodes, width))
    neg = np.zeros((topo.num_nodes, width))
    for node in range(topo.num_nodes):
        for leaf in leaves_under(topo, node):
            for k in range(width):
                pos[node, k] += leaf_prob[leaf] * leaf_dist[leaf, k]
                neg[node, k] += leaf_prob[leaf] * (1.0 - leaf_dist[leaf, k])
    return pos, neg


def loss_two_channel(
    leaf_prob: np.ndarray, leaf_dist: np.ndarray, target: np.ndarray, eps: float = 1e-12
) -> float:
    """Literal two-channel cross entropy: for each threshold and channel,
    weight the log of the reach-weighted channel mixture by the channel's
    target indicator."""
    leaf_dist = np.asarray(leaf_dist, dtype=float)
    num_leaves, width = leaf_dist.shape
    total = 0.0
    for k in range(width):
        for channel in (0, 1):
            indicator = target[k] if channel == 0 else 1.0 - target[k]
            mix = 0.0
            for leaf in range(num_leaves):
                entry = leaf_dist[leaf, k] if channel == 0 else 1.0 - leaf_dist[leaf, k]
                mix += leaf_prob[leaf] * entry
            total -= indicator * np.log(min(max(mix, eps), 1.0 - eps))
    return total


def leaf_update_naive(
    leaf_dist: np.ndarray,
    leaf_prob: np.ndarray,
    targets: np.ndarray,
    eps: float = 1e-12,
) -> tuple[np.ndarray, int]:
    """Literal transcription of the multiplicative leaf update.

    For every (leaf, threshold) pair: the numerator sums, over positive
    samples, the leaf's share of the channel mixture; the denominator adds the
    complementary-channel shares of the negative samples.  All entries update
    simultaneously from the old table.
    """
    leaf_dist = np.asarray(leaf_dist, dtype=float)
    leaf_prob = np.asarray(leaf_prob, dtype=float)
    targets = np.asarray(targets, dtype=float)
    num_leaves, width = leaf_dist.shape
    n = leaf_prob.shape[0]
    new = leaf_dist.copy()
    skipped = 0
    for leaf in range(num_leaves):
        for k in range(width):
            num = 0.0
            den2 = 0.0
            for i in range(n):
                z_pos = 0.0
                z_neg = 0.0
                for other in range(num_leaves):
                    z_pos += leaf_prob[i, other] * leaf_dist[other, k]
                    z_neg += leaf_prob[i, other] * (1.0 - leaf_dist[other, k])
                if targets[i, k] == 1.0:
                    if z_pos > 0.0:
                        num += leaf_prob[i, leaf] * leaf_dist[leaf, k] / z_pos
                else:
                    if z_neg > 0.0:
                        den2 += leaf_prob[i, leaf] * (1.0 - leaf_dist[leaf, k]) / z_neg
            total = num + den2
            if total < eps:
                skipped += 1
                continue
            new[leaf, k] = min(max(num / total, eps), 1.0 - eps)
    return new, skipped
