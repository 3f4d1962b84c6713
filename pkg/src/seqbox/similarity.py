"""Signature similarity: Levenshtein distance over event-type lists and
complete-link agglomerative clustering used to order overview rows.

Distances use unit costs for insert, delete, and substitute. Clustering is the
naive agglomerative scheme where the distance between two clusters is the
maximum pairwise item distance; merge heights are therefore nondecreasing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Minimum number of unit-cost edits transforming token list a into b."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, token_a in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, token_b in enumerate(b, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (token_a != token_b),
            )
        previous = current
    return previous[-1]


@dataclass(frozen=True)
class DistanceMatrix:
    n: int
    d: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if self.n != len(self.d):
            raise ValueError("matrix size disagrees with n")
        for i in range(self.n):
            if self.d[i][i] != 0:
                raise ValueError(f"nonzero diagonal at {i}")
            for j in range(i + 1, self.n):
                if self.d[i][j] != self.d[j][i]:
                    raise ValueError(f"asymmetry at ({i}, {j})")
                if self.d[i][j] < 0:
                    raise ValueError(f"negative distance at ({i}, {j})")


def distance_matrix(signatures: Sequence[Sequence[str]]) -> DistanceMatrix:
    """Pairwise edit distances between signatures."""
    if not signatures:
        raise ValueError("signatures must be nonempty")
    n = len(signatures)
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dist = float(edit_distance(signatures[i], signatures[j]))
            d[i][j] = dist
            d[j][i] = dist
    return DistanceMatrix(n=n, d=tuple(tuple(row) for row in d))


@dataclass(frozen=True)
class Dendrogram:
    """Merge history of the agglomerative clustering.

    Cluster ids follow the usual convention: items are 0..n-1 and the cluster
    created by merge step s gets id n+s. `leaf_order` is the depth-first
    traversal with children visited smallest-leaf first; any internal node's
    leaves are contiguous in it.
    """

    n_items: int
    merges: tuple[tuple[int, int, float], ...]
    leaf_order: tuple[int, ...]


def _children_map(tree: Dendrogram) -> dict[int, tuple[int, int]]:
    return {
        tree.n_items + step: (a, b)
        for step, (a, b, _height) in enumerate(tree.merges)
    }


def _traverse(
    tree: Dendrogram,
    child_key,
) -> tuple[int, ...]:
    """Depth-first leaf collection; children of each node sorted by child_key."""
    children = _children_map(tree)
    root = tree.n_items + len(tree.merges) - 1 if tree.merges else 0
    order: list[int] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node < tree.n_items:
            order.append(node)
            continue
        a, b = children[node]
        first, second = sorted((a, b), key=child_key)
        stack.append(second)
        stack.append(first)
    return tuple(order)


def complete_link_cluster(matrix: DistanceMatrix) -> Dendrogram:
    """Agglomerate items under complete linkage.

    At every step the pair of active clusters at minimum distance merges,
    ties broken by the smallest (i, j) cluster-id pair. Inter-cluster
    distance is the maximum pairwise item distance, maintained through the
    max-form Lance-Williams update.
    """
    n = matrix.n
    if n == 1:
        return Dendrogram(n_items=1, merges=(), leaf_order=(0,))

    pair_dist: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            pair_dist[(i, j)] = matrix.d[i][j]
    active = set(range(n))
    merges: list[tuple[int, int, float]] = []
    next_id = n
    while len(active) > 1:
        height, a, b = min((d, ij[0], ij[1]) for ij, d in pair_dist.items())
        merges.append((a, b, height))
        new = next_id
        next_id += 1
        active.discard(a)
        active.discard(b)
        for other in active:
            d_a = pair_dist.pop((min(a, other), max(a, other)))
            d_b = pair_dist.pop((min(b, other), max(b, other)))
            pair_dist[(other, new)] = max(d_a, d_b)
        del pair_dist[(a, b)]
        active.add(new)

    tree = Dendrogram(n_items=n, merges=tuple(merges), leaf_order=())
    min_leaf = _min_leaf_map(tree)
    order = _traverse(tree, child_key=lambda c: min_leaf[c])
    return Dendrogram(n_items=n, merges=tree.merges, leaf_order=order)


def _min_leaf_map(tree: Dendrogram) -> dict[int, int]:
    min_leaf = {i: i for i in range(tree.n_items)}
    for step, (a, b, _h) in enumerate(tree.merges):
        min_leaf[tree.n_items + step] = min(min_leaf[a], min_leaf[b])
    return min_leaf


def leaf_ordering(tree: Dendrogram, frequencies: Sequence[int]) -> tuple[int, ...]:
    """Row permutation from the dendrogram, heaviest clusters first.

    Depth-first traversal; at each internal node the child whose leaves sum
    to the larger frequency is visited first, ties to the child containing
    the smaller minimum leaf index. Places high-volume clusters at the top
    of the overview.
    """
    if len(frequencies) != tree.n_items:
        raise ValueError("frequencies must align with items")
    weight = {i: int(frequencies[i]) for i in range(tree.n_items)}
    min_leaf = _min_leaf_map(tree)
    for step, (a, b, _h) in enumerate(tree.merges):
        weight[tree.n_items + step] = weight[a] + weight[b]
    return _traverse(tree, child_key=lambda c: (-weight[c], min_leaf[c]))
