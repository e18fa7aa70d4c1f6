"""Randomized checks of every inequality and identity behind the main bound.

Each check draws one random instance from the generator it is given and
returns a :class:`Outcome`.  ``violation`` is how far the instance is from
satisfying the statement (positive means it fails once ``tol`` is taken into
account); ``instance`` holds enough data to replay the failure.

Trial ``i`` of check ``name`` uses the generator seeded with
``(rng_seed, index of name, i)``, so any single trial can be rerun alone.
"""

from dataclasses import dataclass, field

import numpy as np

from . import entropy, hashing, linalg, metrics, pa, states
from .scenario import instance_to_dict, make_rng

TOL = 1e-9


@dataclass
class Outcome:
    ok: bool
    violation: float
    instance: dict = field(default_factory=dict)


def _outcome(lhs, rhs, tol=TOL, **instance):
    """``lhs <= rhs + tol``."""
    v = float(lhs - rhs)
    return Outcome(v <= tol, v, instance)


def _equal(a, b, tol=TOL, **instance):
    v = float(abs(a - b))
    return Outcome(v <= tol, v, instance)


def _mat(A):
    A = np.asarray(A)
    return {"re": A.real.tolist(), "im": A.imag.tolist()}


def random_ensemble(rng, size, dim, exact=True):
    probs = states.random_rational_probs(rng, size) if exact else rng.dirichlet(np.ones(size))
    rhos = [states.random_density(rng, dim, rank=int(rng.integers(1, dim + 1))) for _ in range(size)]
    return states.CqEnsemble(range(size), probs, rhos)


def random_instance(rng, sizes=(4, 8, 16), dims=(1, 2, 4), ss=(1, 2, 3), kinds=("toeplitz", "all_functions")):
    size = int(rng.choice(sizes))
    n = size.bit_length() - 1
    dim = int(rng.choice(dims))
    s = int(rng.choice([x for x in ss if x <= n]))
    kind = str(rng.choice(kinds))
    return pa.PaInstance(random_ensemble(rng, size, dim), hashing.HashFamily(kind, n, s))


def check_schur(rng):
    d = int(rng.integers(2, 7))
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    lhs = float(np.sum(np.abs(np.linalg.eigvals(A)) ** 2))
    rhs = float(np.trace(A @ A.conj().T).real)
    out = _outcome(lhs, rhs, A=_mat(A))
    H = linalg.random_hermitian(rng, d)
    eq = abs(float(np.sum(linalg.eigvalsh(H) ** 2)) - float(np.trace(H @ H.conj().T).real))
    if eq > TOL:
        return Outcome(False, eq, {"H": _mat(H)})
    return out


def check_rank_bound(rng):
    d = int(rng.integers(2, 7))
    r = int(rng.integers(1, d + 1))
    A = linalg.hermitian_with_rank(rng, d, r)
    lhs = linalg.trace_norm(A)
    rhs = np.sqrt(r) * np.sqrt(float(np.trace(A @ A.conj().T).real))
    return _outcome(lhs, rhs, A=_mat(A), rank=r)


ALPHAS = (0.0, 0.5, 1.0, 2.0, 3.0, np.inf)


def check_renyi_monotonicity(rng):
    d = int(rng.integers(1, 6))
    rho = states.random_density(rng, d, rank=int(rng.integers(1, d + 1)))
    a, b = sorted(rng.choice(len(ALPHAS), size=2))
    if rng.random() < 0.5:
        a, b = sorted(rng.uniform(0, 5, size=2))
    else:
        a, b = ALPHAS[a], ALPHAS[b]
    sa, sb = entropy.renyi_entropy(rho, a), entropy.renyi_entropy(rho, b)
    return _outcome(sb, sa, rho=_mat(rho), alpha=float(a), beta=float(b))


def check_subadditivity(rng):
    d1, d2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    r, s = states.random_density(rng, d1), states.random_density(rng, d1)
    r2, s2 = states.random_density(rng, d2), states.random_density(rng, d2)
    lhs = metrics.trace_distance(np.kron(r, r2), np.kron(s, s2))
    out = _outcome(lhs, metrics.trace_distance(r, s) + metrics.trace_distance(r2, s2), rho=_mat(r), sigma=_mat(s))
    eq = abs(metrics.trace_distance(np.kron(r, r2), np.kron(s, r2)) - metrics.trace_distance(r, s))
    if eq > TOL:
        return Outcome(False, eq, {"rho": _mat(r), "sigma": _mat(s), "shared": _mat(r2)})
    return out


def _apply_channel(rng, kind, rho, sigma, d1, d2):
    if kind == "unitary":
        U = linalg.random_unitary(rng, d1 * d2)
        return U @ rho @ U.conj().T, U @ sigma @ U.conj().T
    if kind == "partial_trace":
        def ptr(M):
            return np.einsum("ajbj->ab", M.reshape(d1, d2, d1, d2))
        return ptr(rho), ptr(sigma)
    # pinching in a random basis
    U = linalg.random_unitary(rng, d1 * d2)

    def pinch(M):
        M2 = U.conj().T @ M @ U
        return U @ np.diag(np.diag(M2)) @ U.conj().T
    return pinch(rho), pinch(sigma)


def check_channel_monotonicity(rng):
    d1, d2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    rho, sigma = states.random_density(rng, d1 * d2), states.random_density(rng, d1 * d2)
    kind = str(rng.choice(["unitary", "partial_trace", "pinching"]))
    er, es = _apply_channel(rng, kind, rho, sigma, d1, d2)
    return _outcome(metrics.trace_distance(er, es), metrics.trace_distance(rho, sigma), channel=kind, rho=_mat(rho), sigma=_mat(sigma))


def check_measurement_bound(rng):
    d = int(rng.integers(2, 6))
    rho, sigma = states.random_density(rng, d), states.random_density(rng, d)
    U = linalg.random_unitary(rng, d)
    # projective measurement: rank-1 projectors onto U's columns, merged into random groups
    groups = rng.integers(0, d, size=d)
    P = np.zeros(d)
    Q = np.zeros(d)
    for k in range(d):
        u = U[:, k]
        P[groups[k]] += float(np.real(u.conj() @ rho @ u))
        Q[groups[k]] += float(np.real(u.conj() @ sigma @ u))
    return _outcome(metrics.variational_distance(P, Q), metrics.trace_distance(rho, sigma), rho=_mat(rho), sigma=_mat(sigma))


def check_classical_embedding(rng):
    k = int(rng.integers(2, 8))
    P, Q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    a = metrics.variational_distance(P, Q)
    b = metrics.trace_distance(states.embed_classical(P), states.embed_classical(Q))
    return _equal(a, b, P=P.tolist(), Q=Q.tolist())


def check_coupling(rng):
    k = int(rng.integers(2, 8))
    P, Q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    c = metrics.maximal_coupling(P, Q)
    mp, mq = c.marginals()
    bad = max(np.max(np.abs(mp - P)), np.max(np.abs(mq - Q)), float(-min(c.joint.min(), 0.0)))
    if bad > 1e-12:
        return Outcome(False, float(bad), {"P": P.tolist(), "Q": Q.tolist()})
    return _equal(c.mismatch_probability, metrics.variational_distance(P, Q), tol=1e-12, P=P.tolist(), Q=Q.tolist())


def check_expectation_of_distance(rng):
    k, d = int(rng.integers(2, 6)), int(rng.integers(1, 4))
    probs = rng.dirichlet(np.ones(k))
    a = states.CqEnsemble(range(k), probs, [states.random_density(rng, d) for _ in range(k)])
    b = states.CqEnsemble(range(k), probs, [states.random_density(rng, d) for _ in range(k)])
    lhs = metrics.trace_distance(states.cq_state(a), states.cq_state(b))
    rhs = float(sum(p * metrics.trace_distance(x, y) for p, x, y in zip(probs, a.rhos, b.rhos)))
    return _equal(lhs, rhs, probs=probs.tolist())


def check_trace_vs_hs(rng):
    d = int(rng.integers(2, 7))
    rho = states.random_density(rng, d, rank=int(rng.integers(1, d + 1)))
    sigma = states.random_density(rng, d, rank=int(rng.integers(1, d + 1)))
    r = linalg.rank(rho - sigma)
    rhs = 0.5 * np.sqrt(r * metrics.hs_square_distance(rho, sigma))
    return _outcome(metrics.trace_distance(rho, sigma), rhs, rho=_mat(rho), sigma=_mat(sigma))


def check_nonuniformity_vs_hs(rng):
    e = random_ensemble(rng, int(rng.choice([2, 4, 8])), int(rng.integers(1, 4)))
    s0 = entropy.renyi_entropy(states.average_density(e), 0)
    rhs = 0.5 * 2.0 ** (s0 / 2) * np.sqrt(e.size * metrics.hs_nonuniformity(e))
    return _outcome(metrics.nonuniformity(e), rhs)


def check_hs_closed_form(rng):
    e = random_ensemble(rng, int(rng.choice([2, 4, 8])), int(rng.integers(1, 4)))
    return _equal(metrics.hs_nonuniformity(e, blockwise=False), metrics.hs_nonuniformity_closed_form(e))


def check_seed_decomposition(rng):
    n = int(rng.integers(1, 4))
    inst = pa.PaInstance(random_ensemble(rng, 1 << n, int(rng.integers(1, 3))), hashing.HashFamily("toeplitz", n, 1))
    return _equal(pa.exact_key_distance(inst), pa.monolithic_key_distance(inst), tol=1e-8, scenario=instance_to_dict(inst, "seed-average"))


def check_collision_bound(rng):
    inst = random_instance(rng)
    lhs = pa.expected_hs_nonuniformity(inst)
    rhs = 2.0 ** -pa.collision_entropy(inst.source)
    return _outcome(lhs, rhs, scenario=instance_to_dict(inst, "collision-bound"))


def check_key_distance_bound(rng, tamper=False):
    inst = random_instance(rng)
    bound = pa.theorem1_bound(inst)
    if tamper:
        bound = 0.0
    return _outcome(pa.exact_key_distance(inst), bound, scenario=instance_to_dict(inst, "key-distance-bound"))


def check_data_processing(rng):
    n = int(rng.integers(1, 4))
    inst = pa.PaInstance(
        random_ensemble(rng, 1 << n, int(rng.integers(1, 4))),
        hashing.HashFamily(str(rng.choice(["toeplitz", "gf2n_mult"])), n, int(rng.integers(1, n + 1))),
    )
    hashed = float(np.mean(pa.hashed_conditional_entropies(inst)))
    return _outcome(hashed, pa.conditional_entropy(inst.source), scenario=instance_to_dict(inst, "data-processing"))


# name -> (check, statement)
CHECKS = {
    "schur_inequality": (check_schur, "sum |eig|^2 <= tr(A A^H), equality for Hermitian"),
    "rank_bound": (check_rank_bound, "tr|A| <= sqrt(rank) sqrt(tr(A A^H))"),
    "renyi_monotonicity": (check_renyi_monotonicity, "alpha <= beta => S_alpha >= S_beta"),
    "trace_distance_subadditivity": (check_subadditivity, "trace distance subadditive under (x), equal with shared factor"),
    "channel_monotonicity": (check_channel_monotonicity, "trace distance shrinks under channels"),
    "measurement_bound": (check_measurement_bound, "outcome distance <= trace distance"),
    "classical_embedding": (check_classical_embedding, "variational = trace distance of diagonal embeddings"),
    "maximal_coupling": (check_coupling, "maximal coupling disagrees with probability delta(P,Q)"),
    "cq_distance_expectation": (check_expectation_of_distance, "distance of cq states = E_X distance of conditionals"),
    "seed_average": (check_seed_decomposition, "key distance with seed = average over seeds"),
    "trace_vs_hs": (check_trace_vs_hs, "delta <= 1/2 sqrt(rank * Delta)"),
    "nonuniformity_vs_hs": (check_nonuniformity_vs_hs, "d <= 1/2 2^(S0/2) sqrt(|X| D)"),
    "hs_closed_form": (check_hs_closed_form, "D closed form"),
    "collision_bound": (check_collision_bound, "E_F D(F(Z)|rho) <= 2^-S2"),
    "key_distance_bound": (check_key_distance_bound, "exact key distance <= collision-entropy bound"),
    "data_processing": (check_data_processing, "H(f(Z)|rho) <= H(Z|rho)"),
}


@dataclass
class LemmaSummary:
    name: str
    trials: int
    passed: int
    max_violation: float
    failures: list

    @property
    def failed(self):
        return self.trials - self.passed


def trial_rng(rng_seed, name, trial):
    return make_rng([int(rng_seed), list(CHECKS).index(name), int(trial)])


def run_check(name, trials, rng_seed=0, tamper=False):
    fn = CHECKS[name][0]
    passed = 0
    worst = -np.inf
    failures = []
    for i in range(trials):
        rng = trial_rng(rng_seed, name, i)
        out = fn(rng, tamper=True) if (tamper and name == "key_distance_bound") else fn(rng)
        worst = max(worst, out.violation)
        if out.ok:
            passed += 1
        else:
            failures.append((i, out))
    return LemmaSummary(name, trials, passed, float(worst), failures)


def verify_all(trials, rng_seed=0, tamper=False, names=None):
    names = list(CHECKS) if names is None else names
    return [run_check(n, trials, rng_seed, tamper) for n in names]
