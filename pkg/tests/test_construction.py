import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbtpolar.channel import sigma_from_ebn0
from bbtpolar.construction import (
    PW_KAPPA,
    RateProfile,
    construct,
    construct_ga,
    construct_mhw,
    construct_pw,
    ga_check_node,
    ga_leaf_means,
    hypergeometric_weights,
    mwef_leaf,
    phi,
    phi_inv,
    pw_weights,
    wef_convolve,
)
from bbtpolar.tree import build_coding_tree, encode_leaves, leaf_paths
from oracles import beta_expansion_pw, f_direct, permutation_weight_law

KAPPA = 2.0 ** 0.25


# --- GA --------------------------------------------------------------------


def test_phi_pieces():
    assert phi(0.0) == pytest.approx(1.0)
    x = np.array([0.5, 3.0, 10.0])
    assert np.allclose(phi(x), np.exp(-0.4527 * x**0.86 + 0.0218))
    x = np.array([10.5, 40.0, 400.0])
    assert np.allclose(phi(x), np.sqrt(np.pi / x) * np.exp(-x / 4) * (1 - 10 / (7 * x)), rtol=1e-12)


@pytest.mark.parametrize("x", [0.01, 0.3, 1.0, 2.0, 7.5, 9.5, 12.0, 60.0, 500.0])
def test_phi_inverse_roundtrip(x):
    assert phi_inv(phi(x)) == pytest.approx(x, abs=1e-8)


def test_phi_inverse_in_branch_overlap():
    # the two branches do not meet at x = 10, so values in the jump have two preimages
    assert phi(10.0) < phi(10.0 + 1e-9)
    y = phi(9.99)
    assert phi(phi_inv(y)) == pytest.approx(y, rel=1e-8)


def test_ga_root_only():
    assert ga_leaf_means(1, 0.5).tolist() == [pytest.approx(8.0)]


def test_ga_n2_right_leaf_is_sum():
    assert ga_leaf_means(2, 1.0)[1] == pytest.approx(4.0)


def test_ga_n2_left_leaf_closed_form():
    # inside the small-x branch phi is invertible in closed form
    y = 1.0 - (1.0 - math.exp(-0.4527 * 2.0**0.86 + 0.0218)) ** 2
    closed = ((0.0218 - math.log(y)) / 0.4527) ** (1 / 0.86)
    assert ga_leaf_means(2, 1.0)[0] == pytest.approx(closed, abs=1e-8)


def test_ga_n2_left_leaf_against_density_evolution():
    # consistent Gaussian LLRs of mean 2 pushed through the exact check-node rule
    rng = np.random.default_rng(7)
    a = rng.normal(2.0, 2.0, size=2_000_000)
    b = rng.normal(2.0, 2.0, size=2_000_000)
    de_mean = f_direct(a, b).mean()
    assert ga_leaf_means(2, 1.0)[0] == pytest.approx(de_mean, rel=0.05)


def test_ga_check_node_degrades():
    m = np.array([0.5, 2.0, 8.0, 30.0])
    out = ga_check_node(m, m)
    assert np.all(out < m) and np.all(out > 0)


def test_ga_g_positions_sum_parent_means():
    N, sigma = 11, 0.8
    means = ga_leaf_means(N, sigma)
    assert np.all(np.isfinite(means)) and np.all(means > 0)
    # the rightmost leaf only ever takes g-steps, doubling every level
    depth = len(leaf_paths(build_coding_tree(N))[-1])
    assert means[-1] == pytest.approx(2 / sigma**2 * 2**depth)


def test_ga_invalid_sigma():
    with pytest.raises(ValueError):
        ga_leaf_means(4, 0.0)


def test_construct_ga_examples():
    assert construct_ga(2, 1, 0.0).active == (1,)
    assert construct_ga(2, 1, 6.0).active == (1,)
    p = construct_ga(8, 4, 3.0, rate_for_sigma=0.5)
    assert 7 in p.active and 0 not in p.active
    assert construct_ga(5, 5).active == tuple(range(5))


# --- MWEF ------------------------------------------------------------------


@pytest.mark.parametrize("N, i, d, B", [(8, 7, 8, 1.0), (8, 0, 1, 8.0), (6, 2, 2, 4.0), (1, 0, 1, 1.0)])
def test_mwef_leaf_examples(N, i, d, B):
    m = mwef_leaf(build_coding_tree(N), i)
    assert m.d_min == d and m.B == pytest.approx(B)


@pytest.mark.parametrize("N", range(1, 65))
def test_mwef_dmin_counts_right_steps(N):
    tree = build_coding_tree(N)
    for i, path in enumerate(leaf_paths(tree)):
        assert mwef_leaf(tree, i).d_min == 2 ** sum(path)


def test_mwef_last_leaf_brute_force():
    # subcode with leaves 0..6 frozen and leaf 7 free: a single nonzero codeword
    w = np.zeros((1, 8), dtype=np.uint8)
    w[0, 7] = 1
    c = encode_leaves(build_coding_tree(8), w)
    assert c.sum() == 8


@pytest.mark.parametrize("ell_l", range(1, 7))
def test_hypergeometric_law_by_permutations(ell_l):
    for d_l in range(ell_l + 1):
        for d_r in range(ell_l + 1):
            want = permutation_weight_law(d_l, d_r, ell_l)
            got = hypergeometric_weights(d_l, d_r, ell_l)
            assert set(got) == set(want)
            for w in want:
                assert got[w] == pytest.approx(want[w], abs=1e-12)


def test_wef_convolve_examples():
    # only the zero left label: right weights double
    out = wef_convolve([1, 0, 0], 2, [0, 3, 1], 2)
    assert out.tolist() == pytest.approx([0, 0, 3, 0, 1])
    # length-1 children with full spectra
    assert wef_convolve([1, 1], 1, [1, 1], 1).tolist() == pytest.approx([1, 2, 1])
    assert wef_convolve([0, 0, 0], 2, [1, 2, 1], 2).tolist() == pytest.approx([0] * 5)


def test_wef_convolve_rejects_bad_lengths():
    with pytest.raises(ValueError):
        wef_convolve([1, 1], 2, [1, 1], 1)


@settings(max_examples=100)
@given(st.integers(1, 8), st.data())
def test_wef_convolve_conserves_count(ell_l, data):
    ell_r = data.draw(st.sampled_from([ell_l, ell_l - 1] if ell_l > 1 else [1]))
    wl = data.draw(st.lists(st.integers(0, 5), min_size=ell_l + 1, max_size=ell_l + 1))
    wr = data.draw(st.lists(st.integers(0, 5), min_size=ell_r + 1, max_size=ell_r + 1))
    out = wef_convolve(wl, ell_l, wr, ell_r)
    assert out.sum() == pytest.approx(sum(wl) * sum(wr))


def test_wef_convolve_matches_exact_spectrum_for_full_code():
    # the full code of length 2^n averaged over interleavers keeps the binomial spectrum
    spectrum = np.array([1.0, 1.0])
    ell = 1
    for _ in range(3):
        spectrum = wef_convolve(spectrum, ell, spectrum, ell)
        ell *= 2
    assert spectrum.tolist() == pytest.approx([math.comb(8, d) for d in range(9)])


def test_construct_mhw_examples():
    assert construct_mhw(2, 1).active == (1,)
    assert construct_mhw(7, 7).active == tuple(range(7))
    assert construct_mhw(8, 1).active == (7,)


# --- PW --------------------------------------------------------------------


def test_pw_weight_examples():
    assert pw_weights(build_coding_tree(8)).weights[7] == pytest.approx(KAPPA**2 + KAPPA + 1)
    assert pw_weights(build_coding_tree(8)).weights[7] == pytest.approx(3.6034, abs=1e-4)
    assert pw_weights(build_coding_tree(6)).weights[2] == pytest.approx(KAPPA)
    for N in (3, 6, 13):
        assert pw_weights(build_coding_tree(N)).weights[0] == 0.0
    assert PW_KAPPA == KAPPA


def test_pw_invalid_kappa():
    with pytest.raises(ValueError):
        pw_weights(build_coding_tree(4), 0.0)


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32, 64, 128, 256, 512])
def test_pw_matches_beta_expansion(N):
    ours = pw_weights(build_coding_tree(N)).weights
    ref = beta_expansion_pw(N)
    assert np.allclose(ours, ref)
    assert list(np.argsort(ours, kind="stable")) == list(np.argsort(ref, kind="stable"))


def test_construct_pw_examples():
    assert construct_pw(6, 3).active == (3, 4, 5)
    assert construct_pw(2, 1).active == (1,)
    assert construct_pw(8, 4).active == (3, 5, 6, 7)


# --- shared ----------------------------------------------------------------


@pytest.mark.parametrize("method", ["ga", "mhw", "pw"])
def test_k_above_n_rejected(method):
    with pytest.raises(ValueError):
        construct(4, 5, method)


def test_unknown_method():
    with pytest.raises(ValueError):
        construct(4, 2, "rm")


@pytest.mark.parametrize("method", ["ga", "mhw", "pw"])
@pytest.mark.parametrize("N", [6, 13, 24, 96])
def test_constructions_nested_and_deterministic(method, N):
    prev: set[int] = set()
    for K in range(N + 1):
        p = construct(N, K, method, 3.0, rate_for_sigma=0.5)
        assert p.K == K and len(p.active) == K
        assert prev <= set(p.active)
        prev = set(p.active)
    assert construct(N, N // 2, method) == construct(N, N // 2, method)


def test_profile_validation():
    with pytest.raises(ValueError):
        RateProfile(4, 2, (1, 1), "pw")
    with pytest.raises(ValueError):
        RateProfile(4, 2, (1,), "pw")
    with pytest.raises(ValueError):
        RateProfile(4, 1, (4,), "pw")


def test_profile_roundtrip(tmp_path):
    p = construct_ga(24, 10, 2.5)
    path = tmp_path / "p.json"
    p.save(path)
    assert RateProfile.load(path) == p
    d = json.loads(path.read_text())
    assert d["n"] == 24 and d["k"] == 10 and d["method"] == "ga" and len(d["active"]) == 10
    assert p.frozen == tuple(i for i in range(24) if i not in p.active)
    assert p.active_mask.sum() == 10


def test_design_snr_sigma_convention():
    # design sigma for GA follows the Eb/N0 mapping at the supplied rate
    sigma = sigma_from_ebn0(3.0, 0.5)
    assert ga_leaf_means(1, sigma)[0] == pytest.approx(2 / sigma**2)
