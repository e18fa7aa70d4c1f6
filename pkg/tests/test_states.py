from fractions import Fraction

import numpy as np
import pytest

from qpa import linalg, states
from qpa.errors import DimensionMismatch, NotADensityOperator, ZeroProbabilityEvent

E0 = np.diag([1.0, 0.0])
E1 = np.diag([0.0, 1.0])


def test_check_density_rejects_bad_operators():
    with pytest.raises(NotADensityOperator):
        states.check_density(np.diag([0.5, 0.4]))
    with pytest.raises(NotADensityOperator):
        states.check_density(np.diag([1.5, -0.5]))
    with pytest.raises(NotADensityOperator):
        states.check_density([[0.5, 0.5], [0.0, 0.5]])
    states.check_density(np.eye(3) / 3)


def test_average_density_examples():
    e = states.CqEnsemble([0, 1], [0.5, 0.5], [E0, E1])
    np.testing.assert_allclose(states.average_density(e), np.diag([0.5, 0.5]))
    rho = states.random_density(np.random.default_rng(1), 3)
    np.testing.assert_allclose(states.average_density(states.CqEnsemble([0], [1], [rho])), rho)
    e = states.CqEnsemble([0, 1], [Fraction(3, 4), Fraction(1, 4)], [E0, E1])
    np.testing.assert_allclose(states.average_density(e), np.diag([0.75, 0.25]))


def test_conditioned_density(rng):
    ra, rb, rc = (states.random_density(rng, 2) for _ in range(3))
    e = states.CqEnsemble("abc", [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)], [ra, rb, rc])
    np.testing.assert_allclose(states.conditioned_density(e, "abc"), states.average_density(e))
    np.testing.assert_allclose(states.conditioned_density(e, "c"), rc)
    np.testing.assert_allclose(states.conditioned_density(e, "ab"), 0.5 * ra + 0.5 * rb)
    assert states.event_probability(e, "ab") == Fraction(1, 2)


def test_zero_probability_event():
    e = states.CqEnsemble([0, 1], [Fraction(1), Fraction(0)], [E0, E1])
    with pytest.raises(ZeroProbabilityEvent):
        states.conditioned_density(e, [1])


def test_cq_state_examples():
    e = states.CqEnsemble.trivial_adversary([0.5, 0.5])
    np.testing.assert_allclose(states.cq_state(e), np.diag([0.5, 0.5]))
    e = states.CqEnsemble([0, 1], [1, 0], [np.eye(2) / 2] * 2)
    np.testing.assert_allclose(states.cq_state(e), np.diag([0.5, 0.5, 0, 0]))


def test_cq_state_of_independent_pair_is_a_product(rng):
    rho = states.random_density(rng, 3)
    probs = [0.2, 0.3, 0.5]
    e = states.CqEnsemble(range(3), probs, [rho] * 3)
    np.testing.assert_allclose(states.cq_state(e), np.kron(np.diag(probs), rho), atol=1e-14)


def test_cq_spectrum_matches_full_operator(rng):
    e = states.CqEnsemble(range(4), states.random_rational_probs(rng, 4), [states.random_density(rng, 3) for _ in range(4)])
    np.testing.assert_allclose(
        np.sort(states.cq_spectrum(e).ravel()), np.sort(linalg.eigvalsh(states.cq_state(e))), atol=1e-12
    )


def test_embed_classical():
    np.testing.assert_allclose(states.embed_classical([0.25] * 4), np.eye(4) / 4)
    P = states.embed_classical([0, 1, 0])
    np.testing.assert_allclose(P @ P, P)
    assert linalg.rank(P) == 1


def test_ensemble_validation():
    with pytest.raises(DimensionMismatch):
        states.CqEnsemble([0, 1], [0.5, 0.5], [E0])
    with pytest.raises(ValueError):
        states.CqEnsemble([0, 1], [0.5, 0.4], [E0, E1])
    with pytest.raises(NotADensityOperator):
        states.CqEnsemble([0, 1], [0.5, 0.5], [E0, 2 * E1])
    with pytest.raises(ValueError):
        states.CqEnsemble([0, 0], [0.5, 0.5], [E0, E1])


def test_pushforward_keeps_exact_probabilities(rng):
    rhos = [states.random_density(rng, 2) for _ in range(4)]
    probs = [Fraction(1, 8), Fraction(3, 8), Fraction(1, 4), Fraction(1, 4)]
    e = states.CqEnsemble(range(4), probs, rhos)
    key = states.pushforward(e, [0, 1, 0, 1], [0, 1, 2])
    assert key.exact_probs == (Fraction(3, 8), Fraction(5, 8), Fraction(0))
    np.testing.assert_allclose(key.rhos[0], (rhos[0] + 2 * rhos[2]) / 3)
    np.testing.assert_allclose(states.average_density(key), states.average_density(e))


def test_product_ensemble(rng):
    a = states.CqEnsemble([0, 1], [Fraction(1, 3), Fraction(2, 3)], [E0, E1])
    b = states.CqEnsemble.trivial_adversary([Fraction(1, 2)] * 2)
    ab = states.product_ensemble(a, b)
    assert ab.values == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert ab.exact_probs == (Fraction(1, 6),) * 2 + (Fraction(1, 3),) * 2


def test_random_density_is_valid(rng):
    for dim in (1, 2, 5):
        for r in range(1, dim + 1):
            rho = states.check_density(states.random_density(rng, dim, rank=r))
            assert linalg.rank(rho) == r


def test_random_rational_probs(rng):
    p = states.random_rational_probs(rng, 7)
    assert sum(p) == 1 and all(x > 0 for x in p)
