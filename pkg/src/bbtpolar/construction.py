"""Rate profiles: GA, minimum-Hamming-weight (MHW) and polarization-weight (PW) ranking of leaves."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .channel import sigma_from_ebn0
from .tree import CodingTree, build_coding_tree, leaf_paths

METHODS = ("ga", "mhw", "pw")
PW_KAPPA = 2.0 ** 0.25
DEFAULT_DESIGN_SNR_DB = 3.0


@dataclass(frozen=True)
class RateProfile:
    N: int
    K: int
    active: tuple[int, ...]
    method: str
    design_snr_db: float | None = None

    def __post_init__(self):
        active = tuple(sorted(int(i) for i in self.active))
        if len(set(active)) != len(active):
            raise ValueError("active leaf indices must be distinct")
        if len(active) != self.K or self.K > self.N:
            raise ValueError(f"profile needs K={self.K} <= N={self.N} active leaves, got {len(active)}")
        if active and (active[0] < 0 or active[-1] >= self.N):
            raise ValueError("active leaf index out of range")
        object.__setattr__(self, "active", active)

    @property
    def frozen(self) -> tuple[int, ...]:
        act = set(self.active)
        return tuple(i for i in range(self.N) if i not in act)

    @property
    def active_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        mask[list(self.active)] = True
        return mask

    @property
    def tree(self) -> CodingTree:
        return build_coding_tree(self.N)

    def to_dict(self) -> dict:
        d = {"n": self.N, "k": self.K, "method": self.method, "active": list(self.active)}
        if self.design_snr_db is not None:
            d["design_snr_db"] = self.design_snr_db
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RateProfile":
        return cls(
            N=int(d["n"]),
            K=int(d["k"]),
            active=tuple(d["active"]),
            method=str(d["method"]),
            design_snr_db=d.get("design_snr_db"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "RateProfile":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _check_dims(N: int, K: int) -> None:
    if N < 1 or K < 0 or K > N:
        raise ValueError(f"invalid code dimensions N={N}, K={K}")


def select_most_reliable(reliability: Iterable, K: int) -> tuple[int, ...]:
    """Last ``K`` leaves in ascending (reliability, index) order; higher index wins ties."""
    rel = list(reliability)
    order = sorted(range(len(rel)), key=lambda i: (rel[i], i))
    return tuple(sorted(order[len(order) - K :])) if K else ()


# ---------------------------------------------------------------------------
# Tree propagation shared by GA means and Bhattacharyya parameters


def propagate_down(
    tree: CodingTree,
    root_values: np.ndarray,
    f_rule: Callable[[np.ndarray, np.ndarray], np.ndarray],
    g_rule: Callable[[np.ndarray, np.ndarray], np.ndarray],
    stop: Iterable[int] = (),
) -> dict[int, np.ndarray]:
    """Push per-position values from the root towards the leaves.

    Mirrors the decoder's LLR rules: left child gets ``f_rule`` on position
    pairs ``(i, ceil(l/2)+i)`` plus the odd pass-through, right child gets
    ``g_rule``. Nodes in ``stop`` are evaluated but not expanded.
    """
    stop = set(int(s) for s in stop)
    values = {0: np.asarray(root_values, dtype=np.float64)}
    # level-order numbering puts every parent before its children
    for node in range(tree.num_nodes):
        if node not in values or node in stop or tree.length[node] < 2:
            continue
        a = values[node]
        ell = int(tree.length[node])
        nl, nr = (ell + 1) // 2, ell // 2
        first, second = a[:nr], a[nl:]
        values[int(tree.left[node])] = np.concatenate([f_rule(first, second), a[nr:nl]])
        values[int(tree.right[node])] = g_rule(first, second)
    return values


# ---------------------------------------------------------------------------
# Gaussian approximation

_PHI_SWITCH = 10.0


def log_phi(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    lo = (x > 0) & (x <= _PHI_SWITCH)
    hi = x > _PHI_SWITCH
    out[lo] = -0.4527 * x[lo] ** 0.86 + 0.0218
    xh = x[hi]
    out[hi] = 0.5 * np.log(np.pi / xh) - xh / 4.0 + np.log1p(-10.0 / (7.0 * xh))
    return out


def phi(x) -> np.ndarray:
    return np.exp(log_phi(x))


def phi_inv_log(log_y, tol: float = 1e-10) -> np.ndarray:
    """Solve ``log_phi(x) = log_y`` for ``x >= 0`` by bisection."""
    log_y = np.atleast_1d(np.asarray(log_y, dtype=np.float64))
    lo = np.zeros_like(log_y)
    hi = 4.0 * np.abs(log_y) + 100.0
    while np.any(hi - lo > tol):
        mid = 0.5 * (lo + hi)
        above = log_phi(mid) > log_y
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def phi_inv(y, tol: float = 1e-10) -> np.ndarray:
    return phi_inv_log(np.log(y), tol)


def ga_check_node(m_a, m_b) -> np.ndarray:
    """Mean after f: phi^-1(1 - (1 - phi(m_a)) (1 - phi(m_b)))."""
    la, lb = log_phi(m_a), log_phi(m_b)
    s = np.logaddexp(la, lb)
    # log(phi_a + phi_b - phi_a phi_b), safe when both phis underflow
    log_y = s + np.log1p(-np.exp(la + lb - s))
    return phi_inv_log(log_y)


def ga_node_means(tree: CodingTree, sigma: float, stop: Iterable[int] = ()) -> dict[int, np.ndarray]:
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    root = np.full(tree.N, 2.0 / sigma**2)
    return propagate_down(tree, root, ga_check_node, np.add, stop)


def ga_leaf_means(N: int, sigma: float) -> np.ndarray:
    """GA mean LLR of each leaf, in leaf-index order."""
    return _ga_leaf_means(int(N), float(sigma)).copy()


@lru_cache(maxsize=64)
def _ga_leaf_means(N: int, sigma: float) -> np.ndarray:
    tree = build_coding_tree(N)
    means = ga_node_means(tree, sigma)
    return np.array([means[int(n)][0] for n in tree.leaf_order])


def construct_ga(N: int, K: int, design_snr_db: float = DEFAULT_DESIGN_SNR_DB, rate_for_sigma: float | None = None) -> RateProfile:
    _check_dims(N, K)
    rate = rate_for_sigma if rate_for_sigma is not None else max(K, 1) / N
    sigma = sigma_from_ebn0(design_snr_db, rate)
    means = ga_leaf_means(N, sigma)
    return RateProfile(N, K, select_most_reliable(means, K), "ga", design_snr_db)


# ---------------------------------------------------------------------------
# Minimum-weight enumerators over the uniformly interleaved tree


@dataclass(frozen=True)
class Mwef:
    d_min: int
    log_b: float

    @property
    def B(self) -> float:
        return math.exp(self.log_b)


def _left_step_factor(d: int, ell_l: int, ell_r: int) -> float:
    return sum(
        math.comb(ell_r, dr) * math.comb(d, dr) / math.comb(ell_l, dr)
        for dr in range(min(d, ell_r) + 1)
    )


def mwef_leaf(tree: CodingTree, i: int) -> Mwef:
    """MWEF estimate of the subcode whose first nonzero leaf is ``i``."""
    node = int(tree.leaf_order[i])
    d, log_b = 1, 0.0
    while tree.parent[node] >= 0:
        p = int(tree.parent[node])
        if tree.right[p] == node:
            d *= 2
        else:
            sib = int(tree.right[p])
            log_b += math.log(_left_step_factor(d, int(tree.length[node]), int(tree.length[sib])))
        node = p
    return Mwef(d, log_b)


def hypergeometric_weights(d_l: int, d_r: int, ell_l: int) -> dict[int, float]:
    """Distribution of the parent weight ``d_l + 2 d_r - 2k`` for one pair of child weights."""
    denom = math.comb(ell_l, d_r)
    out: dict[int, float] = {}
    for k in range(max(0, d_l + d_r - ell_l), min(d_l, d_r) + 1):
        p = math.comb(d_l, k) * math.comb(ell_l - d_l, d_r - k) / denom
        w = d_l + 2 * d_r - 2 * k
        out[w] = out.get(w, 0.0) + p
    return out


def wef_convolve(wef_l, ell_l: int, wef_r, ell_r: int) -> np.ndarray:
    """Parent weight spectrum from child spectra indexed by weight."""
    wef_l = np.asarray(wef_l, dtype=np.float64)
    wef_r = np.asarray(wef_r, dtype=np.float64)
    if len(wef_l) != ell_l + 1 or len(wef_r) != ell_r + 1:
        raise ValueError("spectrum lengths must be ell_l + 1 and ell_r + 1")
    if ell_l - ell_r not in (0, 1):
        raise ValueError(f"children of lengths {ell_l} and {ell_r} are not siblings")
    out = np.zeros(ell_l + ell_r + 1)
    for d_l in np.flatnonzero(wef_l):
        for d_r in np.flatnonzero(wef_r):
            scale = wef_l[d_l] * wef_r[d_r]
            for w, p in hypergeometric_weights(int(d_l), int(d_r), ell_l).items():
                out[w] += scale * p
    return out


def construct_mhw(N: int, K: int) -> RateProfile:
    _check_dims(N, K)
    tree = build_coding_tree(N)
    # larger d_min is more reliable; among equal d_min, fewer min-weight words is
    keys = []
    for i in range(N):
        m = mwef_leaf(tree, i)
        keys.append((m.d_min, -round(m.log_b, 9)))
    return RateProfile(N, K, select_most_reliable(keys, K), "mhw")


# ---------------------------------------------------------------------------
# Polarization weights


@dataclass(frozen=True)
class PwTable:
    weights: np.ndarray
    kappa: float
    J: int


def pw_weights(tree: CodingTree, kappa: float = PW_KAPPA) -> PwTable:
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    J = math.ceil(math.log2(tree.N)) - 1 if tree.N > 1 else -1
    weights = np.array([sum(b * kappa ** (J - j) for j, b in enumerate(path)) for path in leaf_paths(tree)], dtype=np.float64)
    return PwTable(weights, kappa, J)


def construct_pw(N: int, K: int, kappa: float = PW_KAPPA) -> RateProfile:
    _check_dims(N, K)
    table = pw_weights(build_coding_tree(N), kappa)
    return RateProfile(N, K, select_most_reliable(table.weights, K), "pw")


def construct(N: int, K: int, method: str, design_snr_db: float = DEFAULT_DESIGN_SNR_DB, rate_for_sigma: float | None = None) -> RateProfile:
    method = method.lower()
    if method == "ga":
        return construct_ga(N, K, design_snr_db, rate_for_sigma)
    if method == "mhw":
        return construct_mhw(N, K)
    if method == "pw":
        return construct_pw(N, K)
    raise ValueError(f"unknown construction method {method!r}; expected one of {METHODS}")
