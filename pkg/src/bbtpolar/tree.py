"""Balanced binary coding tree, the length-adaptive (U+V|V) combine, and the generator matrix.

Bit vectors are ``uint8`` numpy arrays. Every function that touches labels
works on the last axis, so leading batch axes pass straight through.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True, eq=False)
class CodingTree:
    """Skeleton of the coding tree for length ``N``.

    Nodes are numbered in level order (root is 0). Arrays are indexed by node;
    ``-1`` marks a missing parent/child/leaf index.
    """

    N: int
    length: np.ndarray
    depth: np.ndarray
    parent: np.ndarray
    left: np.ndarray
    right: np.ndarray
    start: np.ndarray
    leaf_index: np.ndarray
    leaf_order: np.ndarray

    @property
    def num_nodes(self) -> int:
        return len(self.length)

    @property
    def height(self) -> int:
        return int(self.depth.max())

    def is_leaf(self, node: int) -> bool:
        return self.length[node] == 1

    def span(self, node: int) -> range:
        """Leaf indices covered by ``node``."""
        s = int(self.start[node])
        return range(s, s + int(self.length[node]))

    def internal_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.length >= 2)


def _frozen_array(values, dtype=np.int64) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def build_coding_tree(N: int) -> CodingTree:
    if N < 1:
        raise ValueError(f"code length must be positive, got {N}")
    length, depth, parent, start = [N], [0], [-1], [0]
    left, right = [], []
    i = 0
    while i < len(length):
        ell = length[i]
        if ell >= 2:
            nl, nr = (ell + 1) // 2, ell // 2
            left.append(len(length))
            right.append(len(length) + 1)
            length += [nl, nr]
            depth += [depth[i] + 1] * 2
            parent += [i, i]
            start += [start[i], start[i] + nl]
        else:
            left.append(-1)
            right.append(-1)
        i += 1

    leaf_index = [s if ell == 1 else -1 for s, ell in zip(start, length)]
    leaf_nodes = [n for n, ell in enumerate(length) if ell == 1]
    leaf_order = sorted(leaf_nodes, key=lambda n: start[n])
    return CodingTree(
        N=N,
        length=_frozen_array(length),
        depth=_frozen_array(depth),
        parent=_frozen_array(parent),
        left=_frozen_array(left),
        right=_frozen_array(right),
        start=_frozen_array(start),
        leaf_index=_frozen_array(leaf_index),
        leaf_order=_frozen_array(leaf_order),
    )


def combine(v_l, v_r) -> np.ndarray:
    """Parent label ``(v_l (+) v_r, v_r)``.

    When ``v_l`` is one longer, its trailing element passes through unchanged.
    """
    v_l = np.asarray(v_l, dtype=np.uint8)
    v_r = np.asarray(v_r, dtype=np.uint8)
    nl, nr = v_l.shape[-1], v_r.shape[-1]
    if nl - nr not in (0, 1) or nr < 1:
        raise ValueError(f"cannot combine children of lengths {nl} and {nr}")
    return np.concatenate([v_l[..., :nr] ^ v_r, v_l[..., nr:], v_r], axis=-1)


def split(v) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`combine`."""
    v = np.asarray(v, dtype=np.uint8)
    ell = v.shape[-1]
    if ell < 2:
        raise ValueError(f"cannot split a label of length {ell}")
    nl, nr = (ell + 1) // 2, ell // 2
    v_r = v[..., nl:].copy()
    v_l = v[..., :nl].copy()
    v_l[..., :nr] ^= v_r
    return v_l, v_r


def encode_leaves(tree: CodingTree, w) -> np.ndarray:
    """Root label for leaf labels ``w`` (shape ``(..., N)``)."""
    w = np.asarray(w, dtype=np.uint8)
    if w.shape[-1] != tree.N:
        raise ValueError(f"expected {tree.N} leaf labels, got {w.shape[-1]}")
    return _encode_node(tree, 0, w)


def _encode_node(tree: CodingTree, node: int, w: np.ndarray) -> np.ndarray:
    if tree.length[node] == 1:
        s = tree.start[node]
        return w[..., s : s + 1]
    return combine(
        _encode_node(tree, tree.left[node], w),
        _encode_node(tree, tree.right[node], w),
    )


@lru_cache(maxsize=None)
def _generator_matrix(N: int) -> np.ndarray:
    if N == 1:
        return np.ones((1, 1), dtype=np.uint8)
    nl, nr = (N + 1) // 2, N // 2
    g_l, g_r = _generator_matrix(nl), _generator_matrix(nr)
    g = np.zeros((N, N), dtype=np.uint8)
    g[:nl, :nl] = g_l
    # lower-left block is G_r, padded with a zero column when N is odd
    g[nl:, :nr] = g_r
    g[nl:, nl:] = g_r
    g.setflags(write=False)
    return g


def generator_matrix(N: int) -> np.ndarray:
    """N x N generator matrix with ``encode_leaves(w) == w @ G (mod 2)``."""
    if N < 1:
        raise ValueError(f"code length must be positive, got {N}")
    return _generator_matrix(N)


def leaf_paths(tree: CodingTree) -> list[tuple[int, ...]]:
    """Branch labels root -> leaf (0 = left, 1 = right), one tuple per leaf, left to right."""
    paths = []
    for node in tree.leaf_order:
        bits = []
        n = int(node)
        while tree.parent[n] >= 0:
            p = tree.parent[n]
            bits.append(0 if tree.left[p] == n else 1)
            n = int(p)
        paths.append(tuple(reversed(bits)))
    return paths


def tree_height(N: int) -> int:
    return math.ceil(math.log2(N)) if N > 1 else 0


def format_matrix(g: np.ndarray) -> str:
    return "\n".join("".join(str(int(b)) for b in row) for row in g) + "\n"
