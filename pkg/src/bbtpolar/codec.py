"""Encoding over the coding tree and SC / SCL / CA-SCL decoding.

Decoders accept a single LLR vector of shape ``(N,)`` or a batch ``(B, N)``
and return data of shape ``(K,)`` or ``(B, K)`` respectively.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .construction import RateProfile
from .tree import CodingTree, build_coding_tree, combine, encode_leaves

# ---------------------------------------------------------------------------
# LLR primitives


def f_func(a, b):
    """Exact check-node LLR ``ln((1 + e^(a+b)) / (e^a + e^b))`` in a stable form."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    out = out + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    return out if out.ndim else float(out)


def f_minsum(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    return out if out.ndim else float(out)


def g_func(a, b, c):
    """``b + (-1)^c a``."""
    a = np.asarray(a, dtype=np.float64)
    out = np.asarray(b, dtype=np.float64) + (1.0 - 2.0 * np.asarray(c, dtype=np.float64)) * a
    return out if out.ndim else float(out)


def pm_increment(alpha, beta):
    """Path-metric increment ``sum_j ln(1 + exp(-(1 - 2 beta_j) alpha_j))``."""
    x = (1.0 - 2.0 * np.asarray(beta, dtype=np.float64)) * np.asarray(alpha, dtype=np.float64)
    return np.logaddexp(0.0, -x).sum(axis=-1)


@dataclass
class OpCounter:
    """LLR evaluations, summed over every decoded frame (and live list path)."""

    f_ops: int = 0
    g_ops: int = 0
    copy_ops: int = 0

    @property
    def total(self) -> int:
        return self.f_ops + self.g_ops + self.copy_ops

    def reset(self) -> None:
        self.f_ops = self.g_ops = self.copy_ops = 0


# ---------------------------------------------------------------------------
# CRC


@dataclass(frozen=True)
class CrcConfig:
    """CRC with generator polynomial given as an int, bit ``c`` being the leading ``D^c`` term."""

    length: int
    polynomial: int

    def __post_init__(self):
        if self.length < 1 or self.polynomial >> self.length != 1:
            raise ValueError("polynomial must have degree exactly `length`")


# D^11 + D^10 + D^9 + D^5 + 1
CRC11 = CrcConfig(11, 0b111000100001)


def crc_remainder(bits, crc: CrcConfig) -> np.ndarray:
    """Remainder of ``m(D) D^c mod g(D)``; ``bits[0]`` is the highest-degree message coefficient."""
    c = crc.length
    reg = [int(b) for b in bits] + [0] * c
    poly = [(crc.polynomial >> (c - j)) & 1 for j in range(c + 1)]
    for i in range(len(reg) - c):
        if reg[i]:
            for j in range(c + 1):
                reg[i + j] ^= poly[j]
    return np.array(reg[-c:], dtype=np.uint8)


_CRC_MATRICES: dict[tuple[int, CrcConfig], np.ndarray] = {}


def crc_matrix(k: int, crc: CrcConfig) -> np.ndarray:
    """``(k, c)`` matrix P with ``crc_remainder(m) == m @ P mod 2``."""
    key = (k, crc)
    if key not in _CRC_MATRICES:
        eye = np.eye(k, dtype=np.uint8)
        _CRC_MATRICES[key] = np.array([crc_remainder(row, crc) for row in eye], dtype=np.uint8).reshape(k, crc.length)
    return _CRC_MATRICES[key]


def crc_bits(data, crc: CrcConfig) -> np.ndarray:
    data = np.asarray(data, dtype=np.uint8)
    p = crc_matrix(data.shape[-1], crc)
    return ((data.astype(np.int64) @ p) & 1).astype(np.uint8)


def attach_crc(data, crc: CrcConfig) -> np.ndarray:
    data = np.asarray(data, dtype=np.uint8)
    return np.concatenate([data, crc_bits(data, crc)], axis=-1)


def crc_ok(block, crc: CrcConfig) -> np.ndarray:
    block = np.asarray(block, dtype=np.uint8)
    data, tail = block[..., : -crc.length], block[..., -crc.length :]
    return np.all(crc_bits(data, crc) == tail, axis=-1)


# ---------------------------------------------------------------------------
# Encoding


def leaf_labels(profile: RateProfile, data) -> np.ndarray:
    data = np.asarray(data, dtype=np.uint8)
    if data.shape[-1] != profile.K:
        raise ValueError(f"expected {profile.K} data bits, got {data.shape[-1]}")
    w = np.zeros(data.shape[:-1] + (profile.N,), dtype=np.uint8)
    w[..., list(profile.active)] = data
    return w


def encode(profile: RateProfile, data) -> np.ndarray:
    """Codeword(s) for ``data`` placed on the active leaves in ascending order."""
    return encode_leaves(profile.tree, leaf_labels(profile, data))


# ---------------------------------------------------------------------------
# Tree traversal cores


def _as_batch(llrs, N: int) -> tuple[np.ndarray, bool]:
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape[-1] != N or llrs.ndim not in (1, 2):
        raise ValueError(f"expected LLRs of shape (N,) or (B, N) with N={N}, got {llrs.shape}")
    return (llrs[None, :], True) if llrs.ndim == 1 else (llrs, False)


def _split_llrs(tree: CodingTree, node: int, alpha: np.ndarray, f: Callable, counter: OpCounter | None, scale: int):
    ell = int(tree.length[node])
    nl, nr = (ell + 1) // 2, ell // 2
    first, second = alpha[..., :nr], alpha[..., nl:]
    alpha_l = np.concatenate([f(first, second), alpha[..., nr:nl]], axis=-1)
    if counter is not None:
        counter.f_ops += nr * scale
        counter.copy_ops += (nl - nr) * scale
    return alpha_l, first, second


def _right_llrs(first, second, beta_l, counter: OpCounter | None, scale: int):
    nr = first.shape[-1]
    if counter is not None:
        counter.g_ops += nr * scale
    return second + (1.0 - 2.0 * beta_l[..., :nr]) * first


def traverse_hard(
    tree: CodingTree,
    alpha: np.ndarray,
    is_terminal: Callable[[int], bool],
    decide: Callable[[int, np.ndarray], np.ndarray],
    counter: OpCounter | None = None,
    f: Callable = f_func,
) -> np.ndarray:
    """Single-path SC traversal. ``decide(node, llrs)`` returns the node HBEs at terminals."""
    scale = alpha.shape[0]

    def rec(node: int, a: np.ndarray) -> np.ndarray:
        if is_terminal(node):
            return decide(node, a)
        alpha_l, first, second = _split_llrs(tree, node, a, f, counter, scale)
        beta_l = rec(int(tree.left[node]), alpha_l)
        beta_r = rec(int(tree.right[node]), _right_llrs(first, second, beta_l, counter, scale))
        return combine(beta_l, beta_r)

    return rec(0, alpha)


@dataclass
class TerminalCode:
    """Local code at a terminal node: codewords, their info patterns, and the data slots they fill."""

    codewords: np.ndarray  # (M, ell) uint8
    patterns: np.ndarray  # (M, k) uint8
    data_slice: slice


def traverse_list(
    tree: CodingTree,
    llrs: np.ndarray,
    K: int,
    L: int,
    is_terminal: Callable[[int], bool],
    terminal_code: Callable[[int], TerminalCode],
    counter: OpCounter | None = None,
    f: Callable = f_func,
) -> tuple[np.ndarray, np.ndarray]:
    """List traversal over terminal nodes.

    Returns ``(data, metric)`` with shapes ``(B, L, K)`` and ``(B, L)``; unused
    list slots carry an infinite metric. Survivors are chosen by a stable sort
    on (metric, parent slot, codeword index).
    """
    B = llrs.shape[0]
    metric = np.full((B, L), np.inf)
    metric[:, 0] = 0.0
    data = np.zeros((B, L, K), dtype=np.uint8)
    n_live = 1
    rows = np.arange(B)[:, None]

    def rec(node: int, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nonlocal metric, data, n_live
        if is_terminal(node):
            code = terminal_code(node)
            M = len(code.codewords)
            if M == 1:
                metric = metric + pm_increment(a, code.codewords[0])
                beta = np.broadcast_to(code.codewords[0], a.shape).astype(np.uint8)
                return beta, np.broadcast_to(np.arange(L), (B, L))
            signs = 1.0 - 2.0 * code.codewords.astype(np.float64)
            inc = np.logaddexp(0.0, -(a[:, :, None, :] * signs)).sum(axis=-1)
            cand = (metric[:, :, None] + inc).reshape(B, L * M)
            order = np.argsort(cand, axis=1, kind="stable")[:, :L]
            parent, choice = order // M, order % M
            metric = np.take_along_axis(cand, order, axis=1)
            data = data[rows, parent]
            data[:, :, code.data_slice] = code.patterns[choice]
            n_live = min(L, n_live * M)
            return code.codewords[choice], parent

        scale = B * n_live
        alpha_l, _, _ = _split_llrs(tree, node, a, f, counter, scale)
        beta_l, p1 = rec(int(tree.left[node]), alpha_l)
        a = a[rows, p1]
        ell = int(tree.length[node])
        nl, nr = (ell + 1) // 2, ell // 2
        alpha_r = _right_llrs(a[..., :nr], a[..., nl:], beta_l, counter, B * n_live)
        beta_r, p2 = rec(int(tree.right[node]), alpha_r)
        beta_l = beta_l[rows, p2]
        return combine(beta_l, beta_r), np.take_along_axis(p1, p2, axis=1)

    alpha0 = np.broadcast_to(llrs[:, None, :], (B, L, llrs.shape[-1]))
    rec(0, alpha0)
    return data, metric


def _leaf_terminal(tree: CodingTree):
    return lambda node: tree.length[node] == 1


def _leaf_codes(profile: RateProfile) -> Callable[[int], TerminalCode]:
    tree = profile.tree
    pos = {leaf: j for j, leaf in enumerate(profile.active)}
    frozen = TerminalCode(np.zeros((1, 1), np.uint8), np.zeros((1, 0), np.uint8), slice(0, 0))
    active = np.array([[0], [1]], dtype=np.uint8)

    def code(node: int) -> TerminalCode:
        leaf = int(tree.leaf_index[node])
        j = pos.get(leaf)
        if j is None:
            return frozen
        return TerminalCode(active, active, slice(j, j + 1))

    return code


# ---------------------------------------------------------------------------
# Decoders


def sc_decode(profile: RateProfile, channel_llrs, counter: OpCounter | None = None, min_sum: bool = False) -> np.ndarray:
    tree = profile.tree
    llrs, single = _as_batch(channel_llrs, profile.N)
    out = np.zeros((llrs.shape[0], profile.K), dtype=np.uint8)
    pos = {leaf: j for j, leaf in enumerate(profile.active)}

    def decide(node: int, a: np.ndarray) -> np.ndarray:
        j = pos.get(int(tree.leaf_index[node]))
        if j is None:
            return np.zeros_like(a, dtype=np.uint8)
        hbe = (a < 0).astype(np.uint8)
        out[:, j] = hbe[:, 0]
        return hbe

    traverse_hard(tree, llrs, _leaf_terminal(tree), decide, counter, f_minsum if min_sum else f_func)
    return out[0] if single else out


def _check_list_size(L: int) -> None:
    if L < 1:
        raise ValueError(f"list size must be at least 1, got {L}")


def scl_paths(profile: RateProfile, channel_llrs, L: int, counter: OpCounter | None = None, min_sum: bool = False):
    """Final list ``(data (B, L, K), metric (B, L))`` of leaf-level SCL."""
    _check_list_size(L)
    tree = profile.tree
    llrs, _ = _as_batch(channel_llrs, profile.N)
    return traverse_list(tree, llrs, profile.K, L, _leaf_terminal(tree), _leaf_codes(profile), counter, f_minsum if min_sum else f_func)


def best_path(data: np.ndarray, metric: np.ndarray) -> np.ndarray:
    idx = np.argmin(metric, axis=1)
    return data[np.arange(data.shape[0]), idx]


def crc_select(data: np.ndarray, metric: np.ndarray, crc: CrcConfig) -> tuple[np.ndarray, np.ndarray]:
    """First CRC-passing path in metric order, else the best path. Returns ``(block, passed)``."""
    B = data.shape[0]
    order = np.argsort(metric, axis=1, kind="stable")
    ranked = data[np.arange(B)[:, None], order]
    ok = crc_ok(ranked, crc) & np.isfinite(np.take_along_axis(metric, order, axis=1))
    passed = ok.any(axis=1)
    pick = np.where(passed, np.argmax(ok, axis=1), 0)
    return ranked[np.arange(B), pick], passed


def scl_decode(profile: RateProfile, channel_llrs, L: int, counter: OpCounter | None = None, min_sum: bool = False) -> np.ndarray:
    single = np.ndim(channel_llrs) == 1
    data, metric = scl_paths(profile, channel_llrs, L, counter, min_sum)
    out = best_path(data, metric)
    return out[0] if single else out


def ca_scl_decode(profile: RateProfile, channel_llrs, L: int, crc: CrcConfig = CRC11, counter: OpCounter | None = None, min_sum: bool = False):
    """CRC-aided SCL. ``profile`` carries K + c active leaves. Returns ``(data, crc_passed)``."""
    if profile.K <= crc.length:
        raise ValueError(f"profile with K={profile.K} cannot carry a {crc.length}-bit CRC")
    single = np.ndim(channel_llrs) == 1
    data, metric = scl_paths(profile, channel_llrs, L, counter, min_sum)
    block, passed = crc_select(data, metric, crc)
    out = block[..., : profile.K - crc.length]
    return (out[0], bool(passed[0])) if single else (out, passed)


def sc_op_count(N: int) -> int:
    """Closed-form SC LLR evaluations: the lengths of all internal nodes summed."""
    tree = build_coding_tree(N)
    return int(tree.length[tree.length >= 2].sum())
