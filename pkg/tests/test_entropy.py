import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import shannon, smooth_s0_oracle, smooth_sinf_oracle
from qpa import entropy, linalg, states
from qpa.errors import InvalidAlpha, InvalidEpsilon, TooLarge

ALPHAS = [0, 0.5, 1, 2, 3.7, math.inf]


@pytest.mark.parametrize("alpha", ALPHAS)
def test_pure_state_has_zero_entropy(rng, alpha):
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    v /= np.linalg.norm(v)
    assert entropy.renyi_entropy(np.outer(v, v.conj()), alpha) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("dim", [1, 2, 5, 8])
def test_maximally_mixed(alpha, dim):
    assert entropy.renyi_entropy(np.eye(dim) / dim, alpha) == pytest.approx(math.log2(dim), abs=1e-12)


def test_reference_values_for_three_quarters():
    rho = np.diag([0.75, 0.25])
    assert entropy.renyi_entropy(rho, 0) == 1.0
    assert entropy.renyi_entropy(rho, 2) == pytest.approx(-math.log2(0.625), abs=1e-14)
    assert entropy.renyi_entropy(rho, math.inf) == pytest.approx(math.log2(4 / 3), abs=1e-14)
    assert entropy.von_neumann(rho) == pytest.approx(shannon([0.75, 0.25]), abs=1e-14)
    assert entropy.monotonicity_check(rho, 0, math.inf)


def test_general_alpha_matches_trace_formula(rng):
    rho = states.random_density(rng, 4)
    w = np.linalg.eigvalsh(rho)
    for alpha in (0.3, 2.0, 5.0):
        expected = math.log2(np.sum(w**alpha)) / (1 - alpha)
        assert entropy.renyi_entropy(rho, alpha) == pytest.approx(expected, abs=1e-10)


def test_invalid_arguments():
    with pytest.raises(InvalidAlpha):
        entropy.renyi_entropy(np.eye(2) / 2, -1)
    with pytest.raises(InvalidEpsilon):
        entropy.smooth_renyi_0(np.eye(2) / 2, 1.0)
    with pytest.raises(InvalidEpsilon):
        entropy.smooth_renyi_inf(np.eye(2) / 2, -0.1)
    with pytest.raises(InvalidAlpha):
        entropy.smooth_renyi_entropy(np.eye(2) / 2, 2, 0.1)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from(ALPHAS), st.sampled_from(ALPHAS))
def test_monotone_in_alpha(seed, dim, a, b):
    rho = states.random_density(np.random.default_rng(seed), dim)
    lo, hi = min(a, b), max(a, b)
    assert entropy.monotonicity_check(rho, lo, hi)


def test_smoothing_with_zero_eps_is_unsmoothed(rng):
    rho = states.random_density(rng, 4, rank=3)
    assert entropy.smooth_renyi_0(rho, 0).value == pytest.approx(math.log2(3))
    assert entropy.smooth_renyi_inf(rho, 0).value == pytest.approx(entropy.renyi_entropy(rho, math.inf))


def test_smallest_eigenvalue_is_removable():
    d = 0.02
    rho = np.diag([0.5 - d, 0.5 - d, 2 * d])
    res = entropy.smooth_renyi_0(rho, 2 * d + 1e-12)
    assert res.value == 1.0
    assert res.achieved_distance == pytest.approx(2 * d)
    assert entropy.smooth_renyi_0(rho, 2 * d - 1e-6).value == pytest.approx(math.log2(3))


@pytest.mark.parametrize("eps", [0.01, 0.2, 0.6])
def test_flat_spectrum_cannot_gain_min_entropy(eps):
    assert entropy.smooth_renyi_inf(np.eye(4) / 4, eps).value == pytest.approx(2.0, abs=1e-12)


def _witness_distance(rho_vals, witness):
    # diagonal witness in the eigenbasis of rho, both listed descending
    w = witness.expand()
    w = np.concatenate([w, np.zeros(len(rho_vals) - len(w))])
    return 0.5 * np.abs(np.sort(rho_vals)[::-1] - np.sort(w)[::-1]).sum()


@pytest.mark.parametrize("seed", range(10))
def test_witnesses_are_states_within_eps(seed):
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.full(5, 0.6))
    for eps in (0.01, 0.05, 0.2):
        r0 = entropy.smooth_renyi_0(np.diag(lam), eps)
        ri = entropy.smooth_renyi_inf(np.diag(lam), eps)
        for res in (r0, ri):
            assert res.witness.total() == pytest.approx(1.0, abs=1e-12)
            assert res.achieved_distance <= eps + 1e-12
        # the witnesses realise the reported values
        assert r0.value == pytest.approx(math.log2(r0.witness.rank))
        assert ri.value == pytest.approx(-ri.witness.log2_lambda_max, abs=1e-9)
        # S_inf and S_0 witnesses are both diagonal in rho's eigenbasis; S_0 keeps
        # the ordering, so its distance is read off directly
        assert _witness_distance(lam, r0.witness) <= eps + 1e-12


@pytest.mark.parametrize("seed", range(15))
def test_smoothing_against_grid_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    dim = int(rng.integers(2, 7))
    lam = rng.dirichlet(np.full(dim, 0.5))
    eps, step = 0.05, 1e-3
    assert entropy.smooth_renyi_0(np.diag(lam), eps).value == pytest.approx(smooth_s0_oracle(lam, eps), abs=1e-9)
    c, _ = smooth_sinf_oracle(lam, eps, step)
    got = entropy.smooth_renyi_inf(np.diag(lam), eps).value
    assert -math.log2(c) - 1e-9 <= got <= -math.log2(c - step) + 1e-9


def test_product_spectrum_examples(rng):
    rho = states.random_density(rng, 3)
    sp = entropy.product_spectrum(rho, 1)
    np.testing.assert_allclose(np.sort(sp.expand()), np.sort(np.linalg.eigvalsh(rho)), atol=1e-12)
    pure = np.diag([1.0, 0.0])
    sp = entropy.product_spectrum(pure, 7)
    assert sp.multiplicities == (1,) and sp.eigenvalues[0] == 1.0 and sp.dim == 128
    sp = entropy.product_spectrum(np.diag([0.75, 0.25]), 2)
    np.testing.assert_allclose(sp.eigenvalues, [9 / 16, 3 / 16, 1 / 16])
    assert sp.multiplicities == (1, 2, 1)


def test_product_spectrum_matches_explicit_kron(rng):
    rho = states.random_density(rng, 2)
    big = linalg.kron(linalg.kron(rho, rho), rho)
    sp = entropy.product_spectrum(rho, 3)
    np.testing.assert_allclose(np.sort(sp.expand()), np.sort(np.linalg.eigvalsh(big)), atol=1e-12)


def test_product_spectrum_is_normalised_at_large_n():
    sp = entropy.product_spectrum(np.diag([0.9, 0.1]), 1024)
    assert sp.total() == pytest.approx(1.0, abs=1e-9)
    assert sp.rank == 2**1024
    # additivity of von Neumann entropy
    assert entropy.von_neumann(sp) / 1024 == pytest.approx(shannon([0.9, 0.1]), abs=1e-9)


def test_product_spectrum_caps():
    with pytest.raises(TooLarge):
        entropy.product_spectrum(np.eye(5) / 5, 2)
    with pytest.raises(TooLarge):
        entropy.product_spectrum(np.diag([0.4, 0.3, 0.2, 0.1]), 1000, term_cap=1000)


def test_aep_gap_pure_state():
    eps = 0.01
    for n in (1, 16, 256):
        assert entropy.aep_gap(np.diag([1.0, 0.0]), eps, n, 0) == 0.0
        # the eps-ball reaches outside the support: the peak drops to 1 - eps
        assert entropy.aep_gap(np.diag([1.0, 0.0]), eps, n, math.inf) == pytest.approx(
            -math.log2(1 - eps) / n, abs=1e-12
        )


def test_aep_gap_maximally_mixed_qubit():
    eps = 0.01
    for n in (1, 4, 64, 1024):
        assert entropy.aep_gap(np.eye(2) / 2, eps, n, math.inf) == pytest.approx(0.0, abs=1e-12)
        # a fraction eps of the flat spectrum may be dropped, nothing more
        assert entropy.aep_gap(np.eye(2) / 2, eps, n, 0) <= -math.log2(1 - eps) / n + 1e-12
