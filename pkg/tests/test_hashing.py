from fractions import Fraction

import numpy as np
import pytest

from oracles import is_irreducible, poly_mod, toeplitz_eval
from qpa import hashing
from qpa.errors import LengthMismatch, SeedSpaceTooLarge
from qpa.hashing import HashFamily


def test_toeplitz_zero_seed_is_zero_map():
    fam = HashFamily("toeplitz", 4, 3)
    assert all(fam.evaluate(0, z) == 0 for z in range(16))


def test_toeplitz_single_row():
    fam = HashFamily("toeplitz", 2, 1)
    # seed (1, 0) gives T = [1 0]; z = (1, 0)
    assert fam.evaluate(hashing.bits_to_int([1, 0]), hashing.bits_to_int([1, 0])) == 1
    assert fam.evaluate([1, 0], [0, 1]) == 0


@pytest.mark.parametrize("n, s", [(1, 1), (3, 2), (4, 4), (5, 3)])
def test_toeplitz_against_explicit_matrix(n, s):
    fam = HashFamily("toeplitz", n, s)
    tab = fam.table()
    for seed in range(fam.num_seeds):
        sb = hashing.int_to_bits(seed, fam.seed_bits)
        for z in range(fam.num_inputs):
            expected = hashing.bits_to_int(toeplitz_eval(sb, hashing.int_to_bits(z, n), s))
            assert fam.evaluate(seed, z) == expected == tab[seed, z]


def test_gf2n_identity_seed():
    for n in range(1, 9):
        fam = HashFamily("gf2n_mult", n, n)
        assert [fam.evaluate(1, z) for z in range(1 << n)] == list(range(1 << n))


@pytest.mark.parametrize("n", sorted(hashing.IRREDUCIBLE_POLYS))
def test_polynomials_are_irreducible(n):
    p = hashing.IRREDUCIBLE_POLYS[n]
    assert p.bit_length() - 1 == n
    if n <= 16:
        assert is_irreducible(p)


@pytest.mark.parametrize("n", [1, 3, 5, 8])
def test_gf2n_mul_against_long_division(n, rng):
    p = hashing.IRREDUCIBLE_POLYS[n]
    for _ in range(50):
        a, b = (int(x) for x in rng.integers(0, 1 << n, size=2))
        prod = 0
        for j in range(n):
            if (b >> j) & 1:
                prod ^= a << j
        assert hashing.gf2n_mul(a, b, n) == poly_mod(prod, p)


def test_gf2n_is_a_field():
    n = 4
    units = range(1, 1 << n)
    for a in units:
        assert sorted(hashing.gf2n_mul(a, b, n) for b in units) == list(units)


@pytest.mark.parametrize("kind", ["toeplitz", "gf2n_mult", "all_functions"])
def test_table_matches_scalar_route(kind):
    fam = HashFamily(kind, 3, 2)
    seeds = np.arange(min(fam.num_seeds, 300))
    tab = fam.table(seeds)
    for i, seed in enumerate(seeds):
        assert [fam.evaluate(int(seed), z) for z in range(8)] == tab[i].tolist()


@pytest.mark.parametrize("kind", ["toeplitz", "gf2n_mult"])
def test_linear_families_are_linear(kind):
    fam = HashFamily(kind, 4, 3)
    tab = fam.table()
    for z1 in range(16):
        for z2 in range(16):
            np.testing.assert_array_equal(tab[:, z1 ^ z2], tab[:, z1] ^ tab[:, z2])


@pytest.mark.parametrize("kind", ["toeplitz", "gf2n_mult", "all_functions"])
def test_nonzero_inputs_have_uniform_outputs(kind):
    fam = HashFamily(kind, 3, 2)
    tab = fam.table()
    for z in range(1, 8):
        counts = np.bincount(tab[:, z], minlength=fam.num_outputs)
        assert np.all(counts == fam.num_seeds // fam.num_outputs)


def test_collision_probability_examples():
    fam = HashFamily("all_functions", 3, 2)
    assert hashing.collision_probability(fam, 1, 6) == Fraction(1, 4)
    fam = HashFamily("toeplitz", 2, 1)
    assert hashing.collision_probability(fam, 0b10, 0b01) == Fraction(1, 2)
    fam = HashFamily("gf2n_mult", 3, 1)
    for x in range(8):
        for y in range(x + 1, 8):
            assert hashing.collision_probability(fam, x, y) <= Fraction(1, 2)
    with pytest.raises(ValueError):
        hashing.collision_probability(fam, 3, 3)


def test_certification_examples():
    assert hashing.certify_two_universal(HashFamily("all_functions", 3, 1))
    assert hashing.certify_two_universal(HashFamily("toeplitz", 4, 2))
    assert not hashing.certify_two_universal(HashFamily.constant(3, 1))


def test_certification_rejects_a_near_miss():
    # parity of the low bit only: inputs differing in higher bits always collide
    fam = HashFamily("custom", 3, 1, 1, lambda seed, z: (z ^ seed) & 1)
    assert not hashing.certify_two_universal(fam)


def test_caps():
    with pytest.raises(SeedSpaceTooLarge):
        hashing.certify_two_universal(HashFamily("toeplitz", 7, 1))
    with pytest.raises(SeedSpaceTooLarge):
        hashing.collision_counts(HashFamily("all_functions", 4, 2), cap_bits=24)


def test_bit_conversions():
    assert hashing.bits_to_int([1, 0, 1, 1]) == 13
    assert hashing.int_to_bits(13, 4) == [1, 0, 1, 1]
    assert hashing.to_hex(255) == "ff"
    with pytest.raises(LengthMismatch):
        HashFamily("toeplitz", 2, 1).evaluate(0, [1, 0, 1])
    with pytest.raises(LengthMismatch):
        HashFamily("toeplitz", 2, 1).evaluate(4, 0)


def test_family_validation():
    with pytest.raises(ValueError):
        HashFamily("toeplitz", 2, 3)
    with pytest.raises(ValueError):
        HashFamily("sha256", 2, 1)
    with pytest.raises(ValueError):
        HashFamily("gf2n_mult", 25, 1)
