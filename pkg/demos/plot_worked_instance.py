"""
Hashing two uniform bits to one
===============================

The smallest interesting instance: ``Z`` uniform on two bits, an adversary
holding nothing, and the four Toeplitz matrices ``1 x 2`` as hash functions.
"""

import numpy as np

from qpa import hashing, pa, states

# Source: uniform over {0,1}^2, adversary system of dimension one
source = states.CqEnsemble.trivial_adversary([0.25] * 4)
family = hashing.HashFamily("toeplitz", input_bits=2, output_bits=1)
inst = pa.PaInstance(source, family)

# Each seed fixes a row vector T; the zero seed maps everything to 0
for seed in range(family.num_seeds):
    outputs = [family.evaluate(seed, z) for z in range(4)]
    print("seed %s  outputs %s" % (hashing.to_hex(seed), outputs))

# Distance of the key from uniform, per seed and averaged
per_seed = pa.seed_distances(inst)
print("per-seed distance", np.round(per_seed, 12))
print("average          ", pa.exact_key_distance(inst))

# The same number from the full key (x) adversary (x) seed operators
print("monolithic route ", pa.monolithic_key_distance(inst))

# Collision-entropy bound: (1/2) 2^(-(S2 - S0 - s)/2) with S2 = 2, S0 = 0, s = 1
print("bound            ", pa.theorem1_bound(inst), "=", 2**-0.5 / 2)
