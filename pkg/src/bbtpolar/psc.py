"""Partitioned SC decoding over the dimension-pruned decoding sub-tree."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .codec import (
    CrcConfig,
    OpCounter,
    TerminalCode,
    _as_batch,
    _check_list_size,
    best_path,
    crc_select,
    f_func,
    pm_increment,
    traverse_hard,
    traverse_list,
)
from .construction import RateProfile
from .tree import CodingTree, build_coding_tree, encode_leaves


@dataclass(frozen=True)
class DecodingLeaf:
    node: int
    length: int
    dim: int
    start: int

    @property
    def span(self) -> range:
        return range(self.start, self.start + self.length)


@dataclass(frozen=True)
class LeafCodebook:
    """All codewords of a decoding leaf's local code, in ascending info-pattern order.

    Pattern bits map to the node's active leaves left to right, first leaf most significant.
    """

    codewords: np.ndarray
    patterns: np.ndarray
    data_slice: slice

    @cached_property
    def weights(self) -> np.ndarray:
        return self.codewords.sum(axis=1).astype(np.int64)

    def as_terminal(self) -> TerminalCode:
        return TerminalCode(self.codewords, self.patterns, self.data_slice)


def node_dimensions(tree: CodingTree, profile: RateProfile) -> np.ndarray:
    """Number of active leaves under each node."""
    cs = np.concatenate([[0], np.cumsum(profile.active_mask)])
    return cs[tree.start + tree.length] - cs[tree.start]


@dataclass(frozen=True, eq=False)
class DecodingSubTree:
    profile: RateProfile
    tau: int
    leaves: tuple[DecodingLeaf, ...]
    codebooks: tuple[LeafCodebook, ...] = field(repr=False)

    @property
    def tree(self) -> CodingTree:
        return self.profile.tree

    @cached_property
    def terminal_nodes(self) -> frozenset[int]:
        return frozenset(leaf.node for leaf in self.leaves)

    @cached_property
    def _codebook_by_node(self) -> dict[int, LeafCodebook]:
        return {leaf.node: cb for leaf, cb in zip(self.leaves, self.codebooks)}

    def codebook_for(self, node: int) -> LeafCodebook:
        return self._codebook_by_node[node]


def enumerate_codebook(tree: CodingTree, profile: RateProfile, leaf: DecodingLeaf) -> LeafCodebook:
    active = profile.active_mask[leaf.start : leaf.start + leaf.length]
    local_active = np.flatnonzero(active)
    k = len(local_active)
    M = 1 << k
    patterns = ((np.arange(M)[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.uint8)
    w = np.zeros((M, leaf.length), dtype=np.uint8)
    w[:, local_active] = patterns
    # a node's descendants form the coding tree of its own length
    codewords = encode_leaves(build_coding_tree(leaf.length), w)
    first = int(np.searchsorted(profile.active, leaf.start))
    return LeafCodebook(codewords, patterns, slice(first, first + k))


def extract_subtree(profile: RateProfile, tau: int) -> DecodingSubTree:
    if tau < 1:
        raise ValueError(f"dimension threshold must be positive, got {tau}")
    tree = profile.tree
    dims = node_dimensions(tree, profile)
    leaves = []
    stack = [0]
    while stack:
        node = stack.pop()
        if dims[node] <= tau or tree.length[node] == 1:
            leaves.append(DecodingLeaf(node, int(tree.length[node]), int(dims[node]), int(tree.start[node])))
        else:
            stack += [int(tree.right[node]), int(tree.left[node])]
    leaves = tuple(leaves)
    codebooks = tuple(enumerate_codebook(tree, profile, leaf) for leaf in leaves)
    return DecodingSubTree(profile, tau, leaves, codebooks)


def llr_op_count(subtree: DecodingSubTree) -> int:
    """f/g/copy evaluations of one PSC pass: lengths of the sub-tree's internal nodes summed."""
    tree = subtree.tree
    total, stack = 0, [0]
    while stack:
        node = stack.pop()
        if node in subtree.terminal_nodes:
            continue
        total += int(tree.length[node])
        stack += [int(tree.left[node]), int(tree.right[node])]
    return total


def psc_decode(subtree: DecodingSubTree, channel_llrs, counter: OpCounter | None = None) -> np.ndarray:
    profile = subtree.profile
    llrs, single = _as_batch(channel_llrs, profile.N)
    out = np.zeros((llrs.shape[0], profile.K), dtype=np.uint8)

    def decide(node: int, a: np.ndarray) -> np.ndarray:
        cb = subtree.codebook_for(node)
        if len(cb.codewords) == 1:
            return np.broadcast_to(cb.codewords[0], a.shape).astype(np.uint8)
        corr = a @ (1.0 - 2.0 * cb.codewords.T)
        pick = np.argmax(corr, axis=1)
        out[:, cb.data_slice] = cb.patterns[pick]
        return cb.codewords[pick]

    traverse_hard(subtree.tree, llrs, subtree.terminal_nodes.__contains__, decide, counter, f_func)
    return out[0] if single else out


def pscl_paths(subtree: DecodingSubTree, channel_llrs, L: int, counter: OpCounter | None = None):
    _check_list_size(L)
    profile = subtree.profile
    llrs, _ = _as_batch(channel_llrs, profile.N)
    return traverse_list(
        subtree.tree,
        llrs,
        profile.K,
        L,
        subtree.terminal_nodes.__contains__,
        lambda node: subtree.codebook_for(node).as_terminal(),
        counter,
        f_func,
    )


def pscl_decode(subtree: DecodingSubTree, channel_llrs, L: int, counter: OpCounter | None = None, crc: CrcConfig | None = None) -> np.ndarray:
    """PSCL decoding; with ``crc`` the profile carries K + c leaves and K data bits are returned."""
    if crc is not None:
        return ca_pscl_decode(subtree, channel_llrs, L, crc, counter)[0]
    single = np.ndim(channel_llrs) == 1
    data, metric = pscl_paths(subtree, channel_llrs, L, counter)
    out = best_path(data, metric)
    return out[0] if single else out


def ca_pscl_decode(subtree: DecodingSubTree, channel_llrs, L: int, crc: CrcConfig, counter: OpCounter | None = None):
    """CRC-aided PSCL. Returns ``(data, crc_passed)``."""
    if subtree.profile.K <= crc.length:
        raise ValueError(f"profile with K={subtree.profile.K} cannot carry a {crc.length}-bit CRC")
    single = np.ndim(channel_llrs) == 1
    data, metric = pscl_paths(subtree, channel_llrs, L, counter)
    block, passed = crc_select(data, metric, crc)
    out = block[..., : subtree.profile.K - crc.length]
    return (out[0], bool(passed[0])) if single else (out, passed)


def path_metric(subtree: DecodingSubTree, channel_llrs, data) -> np.ndarray:
    """Metric of the path whose decoding-leaf labels are fixed by ``data`` (shape ``(K,)`` or ``(B, K)``)."""
    llrs, single = _as_batch(channel_llrs, subtree.profile.N)
    data = np.atleast_2d(np.asarray(data, dtype=np.uint8))
    total = np.zeros(llrs.shape[0])

    def force(node: int, a: np.ndarray) -> np.ndarray:
        cb = subtree.codebook_for(node)
        k = cb.patterns.shape[1]
        value = data[:, cb.data_slice] @ (1 << np.arange(k - 1, -1, -1)) if k else np.zeros(len(a), dtype=np.int64)
        beta = cb.codewords[value]
        total[:] += pm_increment(a, beta)
        return beta

    traverse_hard(subtree.tree, llrs, subtree.terminal_nodes.__contains__, force, None, f_func)
    return total[0] if single else total
