"""
Key length and asymptotic rate
==============================

A source whose adversary holds a depolarized copy of ``Z``: the more noise,
the less the adversary knows and the higher the rate ``H(Z|rho)``.  The
finite-size key length trades smooth entropies against the security target.
"""

import numpy as np

from qpa import hashing, pa, scenario, states

# Rate as a function of the depolarizing parameter
for p in (0.0, 0.25, 0.5, 0.75, 1.0):
    scn = scenario.scenario_from_dict({
        "schema_version": 1, "id": "depol", "n": 3, "s": 1, "eps": 0.1,
        "family": "toeplitz", "source": {"generator": "depolarized-copy", "p": p},
    })
    print("p=%.2f  H(Z|rho)=%.4f" % (p, pa.asymptotic_rate(scn.instance().source)))

# Finite-size key length for a nearly uniform 16-bit source and a qubit adversary
rng = np.random.default_rng(0)
N = 1 << 16
probs = rng.dirichlet(np.full(N, 200.0))
rhos = np.array([states.random_density(rng, 2) for _ in range(N)])
inst = pa.PaInstance(states.CqEnsemble(range(N), probs, rhos), hashing.HashFamily("toeplitz", 16, 1))
for eps in (0.1, 0.01, 0.001):
    L = pa.extractable_key_length(inst, eps)
    print("eps=%-6g key length %2d  bound at that length %.4f" % (eps, L, pa.corollary1_bound(inst, eps / 4, s=L)))
