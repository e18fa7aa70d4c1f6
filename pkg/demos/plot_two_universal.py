"""
Certifying two-universal families
=================================

A family is two-universal if distinct inputs collide with probability at
most ``2^-s`` over the seed.  For small ``n`` this can be checked by
counting collisions over every seed.
"""

from qpa import hashing
from qpa.hashing import HashFamily

# Toeplitz and GF(2^n) multiplication pass for every (n, s) up to n = 6
for kind in ("toeplitz", "gf2n_mult"):
    ok = all(
        hashing.certify_two_universal(HashFamily(kind, n, s)) for n in range(1, 7) for s in range(1, n + 1)
    )
    print("%-10s certified for n <= 6: %s" % (kind, ok))

# Exact collision probabilities are Fractions
fam = HashFamily("gf2n_mult", 3, 1)
print("gf2n_mult n=3 s=1, Pr[f(1) = f(6)] =", hashing.collision_probability(fam, 1, 6))

# A family of constant maps collides on every pair
print("constant family certified:", hashing.certify_two_universal(HashFamily.constant(3, 1)))

# The multiplicative identity leaves inputs unchanged when s = n
fam = HashFamily("gf2n_mult", 4, 4)
print([fam.evaluate(1, z) for z in range(16)])
