"""FER bounds for PSC decoding: GA union bound, Bhattacharyya union bound, Bonferroni lower bound."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc

from .construction import ga_node_means, propagate_down
from .psc import DecodingSubTree


@dataclass(frozen=True)
class ComponentChannelStats:
    means: tuple[np.ndarray, ...]
    z: tuple[np.ndarray, ...]
    sigma_worst: np.ndarray
    sigma_best: np.ndarray
    z_worst: np.ndarray


@dataclass(frozen=True)
class BoundReport:
    leaf_g_ub: np.ndarray
    leaf_b_ub: np.ndarray
    leaf_lb: np.ndarray
    g_ub: float
    b_ub: float
    lb: float


def _equivalent_sigma(m: np.ndarray) -> np.ndarray:
    # consistent Gaussian LLR: mean m, variance 2m, i.e. BPSK-AWGN with sigma^2 = 2/m
    with np.errstate(divide="ignore"):
        return np.where(m > 0, np.sqrt(2.0 / np.maximum(m, 1e-300)), np.inf)


def component_stats(subtree: DecodingSubTree, sigma: float) -> ComponentChannelStats:
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    tree = subtree.tree
    stop = subtree.terminal_nodes
    means = ga_node_means(tree, sigma, stop)
    z_root = np.full(tree.N, math.exp(-1.0 / (2.0 * sigma**2)))
    zs = propagate_down(tree, z_root, lambda a, b: a + b - a * b, np.multiply, stop)

    leaf_means = tuple(means[leaf.node] for leaf in subtree.leaves)
    leaf_z = tuple(zs[leaf.node] for leaf in subtree.leaves)
    sig = [_equivalent_sigma(m) for m in leaf_means]
    return ComponentChannelStats(
        means=leaf_means,
        z=leaf_z,
        sigma_worst=np.array([s.max() for s in sig]),
        sigma_best=np.array([s.min() for s in sig]),
        z_worst=np.array([z.max() for z in leaf_z]),
    )


def q_func(x):
    """Gaussian tail probability."""
    out = 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))
    return out if np.ndim(out) else float(out)


def psi_func(rho: float, x: float, y: float, tol: float = 1e-10) -> float:
    """``Pr{X >= x, Y >= y}`` for standard bivariate normals with correlation ``rho`` (Craig-type form)."""
    if not -1.0 < rho < 1.0:
        raise ValueError(f"correlation must lie in (-1, 1), got {rho}")
    if x <= 0 or y <= 0:
        raise ValueError("psi is defined for positive thresholds")
    one_m_r2 = 1.0 - rho * rho
    pref = math.sqrt(one_m_r2)

    def integrand(theta: float, z: float) -> float:
        s = math.sin(theta)
        if s == 0.0:
            return 0.0
        d = 1.0 - rho * math.sin(2.0 * theta)
        return pref / d * math.exp(-0.5 * z * z * d / (one_m_r2 * s * s))

    split = math.atan(y / x)
    first, _ = quad(integrand, 0.0, math.pi / 2 - split, args=(x,), epsabs=tol, epsrel=1e-12, limit=200)
    second, _ = quad(integrand, 0.0, split, args=(y,), epsabs=tol, epsrel=1e-12, limit=200)
    return (first + second) / (2.0 * math.pi)


def pairwise_correlation(w_i: int, w_j: int, w_ij: int) -> float:
    if w_i < 1 or w_j < 1:
        raise ValueError("correlation needs nonzero codeword weights")
    return (w_i + w_j - w_ij) / (2.0 * math.sqrt(w_i * w_j))


def _leaf_lower(codewords: np.ndarray, sigma_best: float) -> float:
    nonzero = codewords[1:]
    w = nonzero.sum(axis=1)
    if len(w) == 0:
        return 0.0
    if not np.isfinite(sigma_best):
        return float(q_func(0.0))
    args = np.sqrt(w) / sigma_best
    first = float(np.sum(q_func(args)))
    second = 0.0
    for i, j in combinations(range(len(w)), 2):
        w_ij = int(np.sum(nonzero[i] ^ nonzero[j]))
        rho = pairwise_correlation(int(w[i]), int(w[j]), w_ij)
        second += psi_func(rho, args[i], args[j])
    return max(first - second, 0.0)


def fer_bounds(subtree: DecodingSubTree, sigma: float) -> BoundReport:
    stats = component_stats(subtree, sigma)
    g, b, lo = [], [], []
    for t, cb in enumerate(subtree.codebooks):
        w = cb.weights[1:]
        g.append(float(np.sum(q_func(np.sqrt(w) / stats.sigma_worst[t]))))
        b.append(float(np.sum(stats.z_worst[t] ** w)))
        lo.append(_leaf_lower(cb.codewords, stats.sigma_best[t]))
    g, b, lo = np.array(g), np.array(b), np.array(lo)
    return BoundReport(
        leaf_g_ub=g,
        leaf_b_ub=b,
        leaf_lb=lo,
        g_ub=float(min(g.sum(), 1.0)),
        b_ub=float(min(b.sum(), 1.0)),
        lb=float(min(lo.max(initial=0.0), 1.0)),
    )
