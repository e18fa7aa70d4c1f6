import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import classical_conditional_entropy, classical_key_distance, shannon
from qpa import entropy, hashing, lemmas, pa, states
from qpa.errors import SeedSpaceTooLarge, ValidationError
from qpa.hashing import HashFamily


def uniform(n):
    return states.CqEnsemble.trivial_adversary([Fraction(1, 1 << n)] * (1 << n))


def test_worked_instance():
    inst = pa.PaInstance(uniform(2), HashFamily("toeplitz", 2, 1))
    np.testing.assert_allclose(pa.seed_distances(inst), [0.5, 0.0, 0.0, 0.0], atol=1e-15)
    assert pa.exact_key_distance(inst) == pytest.approx(0.125, abs=1e-12)
    assert pa.monolithic_key_distance(inst) == pytest.approx(0.125, abs=1e-12)
    assert pa.theorem1_bound(inst) == pytest.approx(2**-0.5 / 2, abs=1e-12)


def test_collision_bound_examples():
    inst = pa.PaInstance(uniform(4), HashFamily("toeplitz", 4, 2))
    assert pa.theorem1_bound(inst) == pytest.approx(0.25, abs=1e-12)
    margin = pa.collision_entropy(inst.source) - pa.adversary_rank_entropy(inst.source)
    assert pa.theorem1_bound(inst, s=margin) == pytest.approx(0.5, abs=1e-12)


def test_smoothed_bound_on_flat_spectrum():
    n, s, eps = 4, 2, 0.01
    inst = pa.PaInstance(uniform(n), HashFamily("toeplitz", n, s))
    assert pa.corollary1_bound(inst, eps) == pytest.approx(0.5 * 2 ** (-(n - s) / 2) + 2 * eps, abs=1e-12)


def test_unsmoothed_bound_is_looser(rng):
    for _ in range(20):
        inst = lemmas.random_instance(rng)
        assert pa.corollary1_bound(inst, 0.0) >= pa.theorem1_bound(inst) - 1e-12


def test_bijective_family_gives_ideal_key(rng):
    n = 3
    rho = states.random_density(rng, 2)
    src = states.CqEnsemble(range(8), [Fraction(1, 8)] * 8, [rho] * 8)
    shift = HashFamily("custom", n, n, n, lambda seed, z: z ^ seed)
    assert pa.exact_key_distance(pa.PaInstance(src, shift)) == pytest.approx(0.0, abs=1e-12)


def test_all_functions_full_output_is_not_ideal():
    # two constant maps (d = 1/2) and two bijections (d = 0) on one bit
    inst = pa.PaInstance(uniform(1), HashFamily("all_functions", 1, 1))
    assert pa.exact_key_distance(inst, method="seeds") == pytest.approx(0.25, abs=1e-15)
    assert pa.exact_key_distance(inst, method="symmetry") == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("kind, n, s", [("toeplitz", 2, 1), ("toeplitz", 3, 2), ("gf2n_mult", 3, 1), ("all_functions", 2, 1)])
def test_perfect_copy_matches_classical_oracle(rng, kind, n, s):
    probs = states.random_rational_probs(rng, 1 << n)
    inst = pa.PaInstance(states.CqEnsemble.perfect_copy(probs), HashFamily(kind, n, s))
    fam = inst.family
    oracle = np.mean(
        [classical_key_distance([float(p) for p in probs], fam.table([seed])[0], fam.num_outputs) for seed in range(fam.num_seeds)]
    )
    assert pa.exact_key_distance(inst) == pytest.approx(oracle, abs=1e-12)
    # knowing z means knowing f(z): every seed is as bad as possible
    assert oracle == pytest.approx(1 - 2.0**-s, abs=1e-12)


@pytest.mark.parametrize("n, s", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_symmetry_reduction_equals_seed_enumeration(rng, n, s):
    src = lemmas.random_ensemble(rng, 1 << n, 2)
    inst = pa.PaInstance(src, HashFamily("all_functions", n, s))
    assert pa.exact_key_distance(inst, method="symmetry") == pytest.approx(pa.exact_key_distance(inst, method="seeds"), abs=1e-12)
    assert pa.expected_hs_nonuniformity(inst, method="symmetry") == pytest.approx(
        pa.expected_hs_nonuniformity(inst, method="seeds"), abs=1e-12
    )


def test_vectorised_seed_route_matches_pushforward(rng):
    src = lemmas.random_ensemble(rng, 8, 2)
    for kind in ("toeplitz", "gf2n_mult"):
        inst = pa.PaInstance(src, HashFamily(kind, 3, 2))
        direct = [pa.key_distance_for_seed(inst, f) for f in range(inst.family.num_seeds)]
        np.testing.assert_allclose(pa.seed_distances(inst), direct, atol=1e-12)


def test_monolithic_route(rng):
    for _ in range(5):
        n = int(rng.integers(1, 3))
        inst = pa.PaInstance(lemmas.random_ensemble(rng, 1 << n, 2), HashFamily("toeplitz", n, 1))
        assert pa.monolithic_key_distance(inst) == pytest.approx(pa.exact_key_distance(inst), abs=1e-10)


def test_sampled_distance_is_consistent(rng):
    inst = pa.PaInstance(lemmas.random_ensemble(rng, 8, 2), HashFamily("toeplitz", 3, 2))
    mean, err = pa.sampled_key_distance(inst, np.random.default_rng(3))
    assert abs(mean - pa.exact_key_distance(inst)) <= 5 * err + 1e-12


def test_rate_reductions(rng):
    probs = states.random_rational_probs(rng, 8)
    p = [float(x) for x in probs]
    assert pa.asymptotic_rate(states.CqEnsemble.trivial_adversary(probs)) == pytest.approx(shannon(p), abs=1e-9)
    assert pa.asymptotic_rate(states.CqEnsemble.perfect_copy(probs)) == pytest.approx(0.0, abs=1e-9)
    # classical side information: rho_z = diag(P(w|z))
    channel = rng.dirichlet(np.ones(5), size=8)
    joint = np.array(p)[:, None] * channel
    src = states.CqEnsemble(range(8), probs, [np.diag(row) for row in channel])
    assert pa.asymptotic_rate(src) == pytest.approx(classical_conditional_entropy(joint), abs=1e-9)


def test_hashing_cannot_increase_conditional_entropy(rng):
    inst = pa.PaInstance(lemmas.random_ensemble(rng, 8, 2), HashFamily("toeplitz", 3, 1))
    assert np.all(pa.hashed_conditional_entropies(inst) <= pa.conditional_entropy(inst.source) + 1e-9)


def test_key_length():
    n = 8
    inst = pa.PaInstance(uniform(n), HashFamily("toeplitz", n, 1), eps=0.1)
    # flat n-bit source, nothing to smooth: n - 0 - 2 log2(1/(4 eps/4))
    assert pa.key_length_rhs(inst) == pytest.approx(n - 2 * math.log2(10), abs=1e-9)
    assert pa.extractable_key_length(inst) == 1
    assert pa.extractable_key_length(inst, eps=1e-6) == 0
    with pytest.raises(ValidationError):
        pa.key_length_rhs(inst, eps=0.0)


def test_report_for_trivial_adversary():
    inst = pa.PaInstance(uniform(3), HashFamily("toeplitz", 3, 1), eps=0.5)
    rep = pa.build_report(inst)
    assert rep.passed and rep.thm1_pass and rep.cor1_pass
    assert rep.exact_d <= rep.thm1_bound
    assert rep.rate == pytest.approx(3.0)
    assert set(rep.to_dict()["witnesses"]) == {"Sinf_eps_cq", "S0_eps_adv"}


def test_report_above_cap_has_bounds_only(rng):
    inst = pa.PaInstance(lemmas.random_ensemble(rng, 8, 2), HashFamily("toeplitz", 3, 2), eps=0.1)
    rep = pa.build_report(inst, cap_bits=2)
    assert rep.exact_d is None and rep.thm1_pass is None and rep.passed
    assert math.isfinite(rep.thm1_bound) and math.isfinite(rep.cor1_bound)
    rep = pa.build_report(inst, cap_bits=2, sample_rng=np.random.default_rng(0))
    assert rep.sampled_d is not None and rep.sampled_d_stderr >= 0
    with pytest.raises(SeedSpaceTooLarge):
        pa.exact_key_distance(inst, cap_bits=2)


def test_instance_validation():
    with pytest.raises(ValidationError):
        pa.PaInstance(uniform(2), HashFamily("toeplitz", 3, 1))
    with pytest.raises(ValidationError):
        pa.PaInstance(uniform(2), HashFamily("toeplitz", 2, 1), eps=-0.1)


def test_spectra_use_cq_blocks(rng):
    src = lemmas.random_ensemble(rng, 4, 3)
    full = entropy.Spectrum.of(states.cq_state(src))
    assert pa.collision_entropy(src) == pytest.approx(entropy.renyi_entropy(full, 2), abs=1e-12)
