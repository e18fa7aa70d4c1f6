"""Two-universal hash families on bit strings.

Bit strings are integers, little-endian: bit ``j`` of the integer is the
``j``-th symbol of the string.  Seeds follow the same convention, and both
serialize as lowercase hex of that integer.

Families
--------
toeplitz
    ``s x n`` Toeplitz matrix over GF(2) with ``T[i, j] = seed[s - 1 - i + j]``
    (first row ``seed[s-1 .. n+s-2]``, first column ``seed[s-1 .. 0]`` read
    downwards).  ``n + s - 1`` seed bits.
gf2n_mult
    Low ``s`` bits of ``seed * z`` in GF(2^n) modulo a fixed irreducible
    polynomial.  ``n`` seed bits.
all_functions
    The seed is the full truth table; output for ``z`` is the ``z``-th block
    of ``s`` bits.  ``s * 2^n`` seed bits.
custom
    Any callable ``(seed, z) -> output``; used for test families.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import LengthMismatch, SeedSpaceTooLarge

SEED_CAP_BITS = 24
KINDS = ("toeplitz", "gf2n_mult", "all_functions", "custom")

# x^n + (lower terms); one fixed low-weight irreducible polynomial per degree.
IRREDUCIBLE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    9: (1 << 9) | (1 << 4) | 1,
    10: (1 << 10) | (1 << 3) | 1,
    11: (1 << 11) | (1 << 2) | 1,
    12: (1 << 12) | (1 << 3) | 1,
    13: (1 << 13) | (1 << 4) | (1 << 3) | (1 << 1) | 1,
    14: (1 << 14) | (1 << 5) | 1,
    15: (1 << 15) | (1 << 1) | 1,
    16: (1 << 16) | (1 << 5) | (1 << 3) | (1 << 1) | 1,
    17: (1 << 17) | (1 << 3) | 1,
    18: (1 << 18) | (1 << 7) | 1,
    19: (1 << 19) | (1 << 5) | (1 << 2) | (1 << 1) | 1,
    20: (1 << 20) | (1 << 3) | 1,
    21: (1 << 21) | (1 << 2) | 1,
    22: (1 << 22) | (1 << 1) | 1,
    23: (1 << 23) | (1 << 5) | 1,
    24: (1 << 24) | (1 << 4) | (1 << 3) | (1 << 1) | 1,
}


@dataclass(frozen=True)
class HashFamily:
    """A finite family of functions ``{0,1}^n -> {0,1}^s`` indexed by seeds."""

    kind: str
    input_bits: int
    output_bits: int
    custom_seed_bits: int = 0
    custom_fn: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("unknown family kind %r" % (self.kind,))
        if self.output_bits < 1:
            raise ValueError("output_bits must be >= 1")
        if self.output_bits > self.input_bits:
            raise ValueError("output_bits %d exceeds input_bits %d" % (self.output_bits, self.input_bits))
        if self.kind == "gf2n_mult" and self.input_bits not in IRREDUCIBLE_POLYS:
            raise ValueError("gf2n_mult supports 1 <= n <= 24")
        if self.kind == "custom" and self.custom_fn is None:
            raise ValueError("custom family needs custom_fn")

    @classmethod
    def constant(cls, n, s):
        """Degenerate family whose every member maps everything to 0."""
        return cls("custom", n, s, 1, lambda seed, z: 0)

    @property
    def seed_bits(self):
        n, s = self.input_bits, self.output_bits
        if self.kind == "toeplitz":
            return n + s - 1
        if self.kind == "gf2n_mult":
            return n
        if self.kind == "all_functions":
            return s << n
        return self.custom_seed_bits

    @property
    def num_seeds(self):
        return 1 << self.seed_bits

    @property
    def num_inputs(self):
        return 1 << self.input_bits

    @property
    def num_outputs(self):
        return 1 << self.output_bits

    def enumerable(self, cap_bits=SEED_CAP_BITS):
        return self.seed_bits <= cap_bits

    def evaluate(self, seed, z):
        """Hash a single input.  ``seed`` and ``z`` are ints (or bit sequences)."""
        seed = _as_int(seed, self.seed_bits, "seed")
        z = _as_int(z, self.input_bits, "input")
        n, s = self.input_bits, self.output_bits
        if self.kind == "toeplitz":
            out = 0
            for i in range(s):
                row = (seed >> (s - 1 - i)) & ((1 << n) - 1)
                out |= (bin(row & z).count("1") & 1) << i
            return out
        if self.kind == "gf2n_mult":
            return gf2n_mul(seed, z, n) & ((1 << s) - 1)
        if self.kind == "all_functions":
            return (seed >> (z * s)) & ((1 << s) - 1)
        return int(self.custom_fn(seed, z))

    def table(self, seeds=None):
        """Outputs for every (seed, input): array of shape (len(seeds), 2^n)."""
        seeds = np.arange(self.num_seeds, dtype=np.int64) if seeds is None else np.asarray(seeds, dtype=np.int64)
        z = np.arange(self.num_inputs, dtype=np.int64)
        n, s = self.input_bits, self.output_bits
        if self.kind == "toeplitz":
            out = np.zeros((seeds.size, z.size), dtype=np.int64)
            for i in range(s):
                rows = (seeds >> (s - 1 - i)) & ((1 << n) - 1)
                par = np.bitwise_count(rows[:, None] & z[None, :]) & 1
                out |= par.astype(np.int64) << i
            return out
        if self.kind == "gf2n_mult":
            prod = _gf2n_mul_array(seeds[:, None], z[None, :], n)
            return prod & ((1 << s) - 1)
        if self.kind == "all_functions":
            if self.seed_bits > 62:
                raise SeedSpaceTooLarge("truth tables of %d bits do not fit an int64" % self.seed_bits)
            return (seeds[:, None] >> (z[None, :] * s)) & ((1 << s) - 1)
        return np.array([[self.evaluate(int(a), int(b)) for b in z] for a in seeds], dtype=np.int64)


def _as_int(value, bits, name):
    if isinstance(value, (int, np.integer)):
        value = int(value)
        if value < 0 or value >> bits:
            raise LengthMismatch("%s %d does not fit in %d bits" % (name, value, bits))
        return value
    seq = [int(b) for b in value]
    if len(seq) != bits:
        raise LengthMismatch("%s has %d bits, expected %d" % (name, len(seq), bits))
    return bits_to_int(seq)


def bits_to_int(bits):
    """Little-endian bit sequence to int: ``bits[j]`` is bit ``j``."""
    return sum(int(b) << j for j, b in enumerate(bits))


def int_to_bits(value, length):
    return [(value >> j) & 1 for j in range(length)]


def to_hex(value):
    return format(int(value), "x")


def clmul(a, b):
    """Carry-less product of two nonnegative ints."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_mod(a, poly):
    deg = poly.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= poly << (a.bit_length() - 1 - deg)
    return a


def gf2n_mul(a, b, n):
    return gf2_mod(clmul(a, b), IRREDUCIBLE_POLYS[n])


def _gf2n_mul_array(a, b, n):
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    out = np.zeros(a.shape, dtype=np.int64)
    for j in range(n):
        out ^= np.where((b >> j) & 1, a << j, 0)
    poly = IRREDUCIBLE_POLYS[n]
    for d in range(2 * n - 2, n - 1, -1):
        out ^= np.where((out >> d) & 1, poly << (d - n), 0)
    return out


def collision_probability(fam, x, x2, cap_bits=SEED_CAP_BITS):
    """Exact ``Pr_seed[f(x) = f(x2)]`` as a Fraction, by seed enumeration."""
    if x == x2:
        raise ValueError("inputs must be distinct")
    if not fam.enumerable(cap_bits):
        raise SeedSpaceTooLarge("%d seed bits exceed cap %d" % (fam.seed_bits, cap_bits))
    hits = 0
    for lo in range(0, fam.num_seeds, 1 << 16):
        seeds = np.arange(lo, min(lo + (1 << 16), fam.num_seeds))
        if fam.kind == "custom":
            col = np.array([[fam.evaluate(int(sd), x), fam.evaluate(int(sd), x2)] for sd in seeds])
        else:
            col = fam.table(seeds)[:, [x, x2]]
        hits += int(np.count_nonzero(col[:, 0] == col[:, 1]))
    return Fraction(hits, fam.num_seeds)


def collision_counts(fam, cap_bits=SEED_CAP_BITS):
    """Matrix ``C[x, x2]`` = number of seeds on which ``x`` and ``x2`` collide."""
    if not fam.enumerable(cap_bits):
        raise SeedSpaceTooLarge("%d seed bits exceed cap %d" % (fam.seed_bits, cap_bits))
    N = fam.num_inputs
    counts = np.zeros((N, N), dtype=np.int64)
    chunk = max(1, (1 << 20) // (N * N))
    for lo in range(0, fam.num_seeds, chunk):
        tab = fam.table(np.arange(lo, min(lo + chunk, fam.num_seeds)))
        counts += np.sum(tab[:, :, None] == tab[:, None, :], axis=0)
    return counts


def certify_two_universal(fam, max_input_bits=6, cap_bits=SEED_CAP_BITS):
    """Exhaustively check ``Pr[f(x) = f(x2)] <= 2^-s`` for every distinct pair."""
    if fam.input_bits > max_input_bits:
        raise SeedSpaceTooLarge("exhaustive certification limited to n <= %d" % max_input_bits)
    counts = collision_counts(fam, cap_bits)
    np.fill_diagonal(counts, 0)
    # count / 2^seed_bits <= 2^-s, in integers
    return bool(np.all(counts << fam.output_bits <= fam.num_seeds))
