"""Privacy amplification by two-universal hashing against a quantum adversary.

An instance is a source ensemble ``(Z, rho_z)`` with ``Z`` ranging over
``{0,1}^n`` (values ``0 .. 2^n - 1``), a hash family ``{0,1}^n -> {0,1}^s``
and a security target ``eps``.  The distance of the hashed key from an ideal
key, averaged over the public seed, is computed exactly by enumeration and
compared with the collision-entropy bound and its smoothed variant.

Exact averages over seeds
-------------------------
For seeded families the average runs over every seed in a fixed order.  For
the family of *all* functions the seed space (``2^(s 2^n)`` truth tables) is
far too large, but buckets of a uniformly random function are exchangeable:
each ``z`` lands in a given bucket independently with probability ``2^-s``.
The average over functions therefore reduces to a weighted sum over the
``2^(2^n)`` subsets of inputs, which is exact and cheap for ``n <= 4``.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import entropy, hashing, linalg, metrics, states
from .errors import SeedSpaceTooLarge, ValidationError

EXACT_TOL = 1e-9
MC_MIN_SAMPLES = 10_000


@dataclass(frozen=True, eq=False)
class PaInstance:
    """Source ensemble over ``{0,1}^n``, hash family and security target."""

    source: states.CqEnsemble
    family: hashing.HashFamily
    eps: float = 0.0

    def __post_init__(self):
        n = self.family.input_bits
        if self.source.values != tuple(range(1 << n)):
            raise ValidationError("source", "values must be 0 .. 2^%d - 1 to match the family input" % n)
        if self.eps < 0:
            raise ValidationError("eps", "must be >= 0")

    @property
    def n(self):
        return self.family.input_bits

    @property
    def s(self):
        return self.family.output_bits

    def with_family(self, family):
        return PaInstance(self.source, family, self.eps)

    def with_output_bits(self, s):
        f = self.family
        return self.with_family(hashing.HashFamily(f.kind, f.input_bits, s, f.custom_seed_bits, f.custom_fn))


def cq_spectrum(source):
    """Spectrum of ``[{Z} (x) rho]`` assembled from the diagonal blocks."""
    return entropy.Spectrum.from_eigenvalues(states.cq_spectrum(source).ravel(), dim=source.size * source.dim)


def adversary_spectrum(source):
    return entropy.Spectrum.of(states.average_density(source))


def collision_entropy(source):
    """``S_2`` of the cq state."""
    return entropy.renyi_entropy(cq_spectrum(source), 2)


def adversary_rank_entropy(source):
    """``S_0`` of the adversary's average state."""
    return entropy.renyi_entropy(adversary_spectrum(source), 0)


def theorem1_bound(inst, s=None):
    """``(1/2) 2^(-(S_2(cq) - S_0([rho]) - s)/2)``: bound on the key's distance."""
    s = inst.s if s is None else s
    margin = collision_entropy(inst.source) - adversary_rank_entropy(inst.source) - s
    return 0.5 * 2.0 ** (-0.5 * margin)


def smoothed_entropies(source, eps_smooth):
    """``(S_inf^eps(cq), S_0^eps([rho]))`` smoothing results, witnesses included."""
    return (
        entropy.smooth_renyi_inf(cq_spectrum(source), eps_smooth),
        entropy.smooth_renyi_0(adversary_spectrum(source), eps_smooth),
    )


def corollary1_bound(inst, eps_smooth, s=None):
    """``(1/2) 2^(-(S_inf^eps(cq) - S_0^eps([rho]) - s)/2) + 2 eps``.

    The smoothing heuristics under-estimate ``S_inf^eps`` and over-estimate
    ``S_0^eps``, so the value stays a valid (possibly loose) upper bound.
    """
    s = inst.s if s is None else s
    hinf, h0 = smoothed_entropies(inst.source, eps_smooth)
    return 0.5 * 2.0 ** (-0.5 * (hinf.value - h0.value - s)) + 2.0 * eps_smooth


def key_distance_for_seed(inst, seed):
    """Non-uniformity of ``f(Z)`` given the adversary, for one fixed seed.

    Goes through the pushforward ensemble and conditioned densities; slow but
    direct.  :func:`seed_distances` is the vectorised equivalent.
    """
    labels = [inst.family.evaluate(seed, z) for z in inst.source.values]
    key = states.pushforward(inst.source, labels, range(inst.family.num_outputs))
    return metrics.nonuniformity(key)


def _bucket_blocks(inst, tab):
    """``sum_{z: f(z)=t} P(z) rho_z - [rho]/|S|`` for each seed row of ``tab``."""
    src = inst.source
    T = inst.family.num_outputs
    onehot = (tab[:, None, :] == np.arange(T)[None, :, None]).astype(float)
    blocks = np.einsum("stz,zij->stij", onehot, src.weighted_blocks())
    return blocks - states.average_density(src)[None, None] / T


def _seed_chunks(inst, cap_bits):
    fam = inst.family
    if not fam.enumerable(cap_bits):
        raise SeedSpaceTooLarge("%d seed bits exceed cap %d" % (fam.seed_bits, cap_bits))
    per_seed = fam.num_outputs * inst.source.dim**2 * max(fam.num_inputs, 1)
    chunk = max(1, (1 << 22) // per_seed)
    for lo in range(0, fam.num_seeds, chunk):
        yield fam.table(np.arange(lo, min(lo + chunk, fam.num_seeds)))


def seed_distances(inst, cap_bits=hashing.SEED_CAP_BITS):
    """``d(f(Z)|rho)`` for every seed, in seed order."""
    out = []
    for tab in _seed_chunks(inst, cap_bits):
        w = linalg.eigvalsh_batch(_bucket_blocks(inst, tab))
        out.append(0.5 * np.abs(w).sum(axis=(1, 2)))
    return np.concatenate(out)


def seed_hs_distances(inst, cap_bits=hashing.SEED_CAP_BITS):
    """``D(f(Z)|rho)`` for every seed, in seed order."""
    out = []
    for tab in _seed_chunks(inst, cap_bits):
        out.append(np.sum(np.abs(_bucket_blocks(inst, tab)) ** 2, axis=(1, 2, 3)))
    return np.concatenate(out)


def _subset_terms(inst, cap_bits):
    """Yield ``(weights, blocks)`` over all subsets of inputs, for all_functions."""
    src = inst.source
    N = src.size
    if N > cap_bits:
        raise SeedSpaceTooLarge("2^%d input subsets exceed cap 2^%d" % (N, cap_bits))
    T = inst.family.num_outputs
    q = 1.0 / T
    wb = src.weighted_blocks().reshape(N, -1)
    shift = states.average_density(src).ravel() / T
    d = src.dim
    step = max(1, (1 << 20) // max(d * d, 1))
    for lo in range(0, 1 << N, step):
        masks = np.arange(lo, min(lo + step, 1 << N), dtype=np.int64)
        bits = ((masks[:, None] >> np.arange(N)[None, :]) & 1).astype(float)
        sizes = bits.sum(axis=1)
        weights = q**sizes * (1.0 - q) ** (N - sizes)
        blocks = (bits @ wb - shift).reshape(-1, d, d)
        yield weights, blocks


def _all_functions_distance(inst, cap_bits):
    T = inst.family.num_outputs
    total = []
    for weights, blocks in _subset_terms(inst, cap_bits):
        norms = np.abs(linalg.eigvalsh_batch(blocks)).sum(axis=1)
        total.append(float(np.dot(weights, norms)))
    return 0.5 * T * math.fsum(total)


def _all_functions_hs(inst, cap_bits):
    T = inst.family.num_outputs
    total = []
    for weights, blocks in _subset_terms(inst, cap_bits):
        total.append(float(np.dot(weights, np.sum(np.abs(blocks) ** 2, axis=(1, 2)))))
    return T * math.fsum(total)


def _use_symmetry(inst, method):
    if method == "auto":
        return inst.family.kind == "all_functions"
    if method == "symmetry":
        if inst.family.kind != "all_functions":
            raise ValueError("symmetry reduction only applies to all_functions")
        return True
    if method == "seeds":
        return False
    raise ValueError("unknown method %r" % (method,))


def exact_key_distance(inst, cap_bits=hashing.SEED_CAP_BITS, method="auto"):
    """``d(F(Z) | {F} (x) rho)`` as the exact average of per-seed distances.

    ``method`` is ``"seeds"`` (enumerate seeds), ``"symmetry"`` (subset sum,
    all_functions only) or ``"auto"``.
    """
    if _use_symmetry(inst, method):
        return _all_functions_distance(inst, cap_bits)
    return math.fsum(seed_distances(inst, cap_bits)) / inst.family.num_seeds


def expected_hs_nonuniformity(inst, cap_bits=hashing.SEED_CAP_BITS, method="auto"):
    """``E_F[D(F(Z)|rho)]``, exact."""
    if _use_symmetry(inst, method):
        return _all_functions_hs(inst, cap_bits)
    return math.fsum(seed_hs_distances(inst, cap_bits)) / inst.family.num_seeds


def sampled_key_distance(inst, rng, samples=MC_MIN_SAMPLES):
    """Monte Carlo estimate over uniformly drawn seeds: ``(mean, standard error)``."""
    samples = max(int(samples), MC_MIN_SAMPLES)
    fam = inst.family
    if fam.seed_bits > 62:
        raise SeedSpaceTooLarge("cannot sample %d-bit seeds as int64" % fam.seed_bits)
    seeds = rng.integers(0, fam.num_seeds, size=samples, dtype=np.int64)
    vals = []
    for lo in range(0, samples, 4096):
        tab = fam.table(seeds[lo:lo + 4096])
        w = linalg.eigvalsh_batch(_bucket_blocks(inst, tab))
        vals.append(0.5 * np.abs(w).sum(axis=(1, 2)))
    vals = np.concatenate(vals)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def joint_key_seed_states(inst, cap=512):
    """Full operators ``[{F(Z)} (x) rho (x) {F}]`` and ``[{U}] (x) [rho] (x) [{F}]``.

    Built monolithically in the key (x) adversary (x) seed ordering; only for
    instances small enough to hold both matrices.
    """
    fam, src = inst.family, inst.source
    T, d, K = fam.num_outputs, src.dim, fam.num_seeds
    if T * d * K > cap:
        raise linalg.DimensionOverflow("joint state dimension %d exceeds cap %d" % (T * d * K, cap))
    avg = states.average_density(src)
    real = np.zeros((T * d * K,) * 2, dtype=complex)
    ideal = np.zeros_like(real)
    seed_proj = np.eye(K)
    for f in range(K):
        per_key = np.zeros((T * d, T * d), dtype=complex)
        for z in src.values:
            t = fam.evaluate(f, z)
            per_key += np.kron(_proj(T, t), src.probs[z] * src.rhos[z])
        real += np.kron(per_key, np.outer(seed_proj[f], seed_proj[f])) / K
        ideal += np.kron(np.kron(np.eye(T) / T, avg), np.outer(seed_proj[f], seed_proj[f])) / K
    return real, ideal


def _proj(dim, i):
    P = np.zeros((dim, dim))
    P[i, i] = 1.0
    return P


def monolithic_key_distance(inst, cap=512):
    """Trace distance between the two operators of :func:`joint_key_seed_states`."""
    real, ideal = joint_key_seed_states(inst, cap)
    return metrics.trace_distance(real, ideal)


def conditional_entropy(source):
    """``H(Z|rho) = S([{Z} (x) rho]) - S([rho])`` in bits."""
    return entropy.von_neumann(cq_spectrum(source)) - entropy.von_neumann(adversary_spectrum(source))


def asymptotic_rate(source):
    """Secret-key rate per copy of the source, ``H(Z|rho)``."""
    return conditional_entropy(source)


def hashed_conditional_entropies(inst, seeds=None):
    """``H(f(Z)|rho)`` per seed (all seeds by default)."""
    fam = inst.family
    seeds = range(fam.num_seeds) if seeds is None else seeds
    out = []
    for f in seeds:
        labels = [fam.evaluate(f, z) for z in inst.source.values]
        key = states.pushforward(inst.source, labels, range(fam.num_outputs))
        out.append(conditional_entropy(key))
    return np.array(out)


def key_length_rhs(inst, eps=None):
    """Real-valued key length ``S_inf^e(cq) - S_0^e([rho]) - 2 log2(1/(4e))``, ``e = eps/4``."""
    eps = inst.eps if eps is None else eps
    if not eps > 0:
        raise ValidationError("eps", "key length needs eps > 0")
    eps_bar = eps / 4.0
    hinf, h0 = smoothed_entropies(inst.source, eps_bar)
    return hinf.value - h0.value - 2.0 * math.log2(1.0 / (4.0 * eps_bar))


def extractable_key_length(inst, eps=None):
    """Floor of :func:`key_length_rhs`, clamped to ``[0, n]``."""
    rhs = key_length_rhs(inst, eps)
    return int(min(max(math.floor(rhs), 0), inst.n))


@dataclass
class SecurityReport:
    """Everything computed for one instance; ``exact_d`` is None above the cap."""

    n: int
    s: int
    eps: float
    family: str
    exact_d: Optional[float]
    thm1_bound: float
    cor1_bound: float
    key_len: int
    key_len_rhs: Optional[float]
    rate: float
    entropies: dict
    thm1_pass: Optional[bool]
    cor1_pass: Optional[bool]
    eps_secure: Optional[bool]
    passed: bool
    sampled_d: Optional[float] = None
    sampled_d_stderr: Optional[float] = None
    witnesses: dict = field(default_factory=dict)
    runtime_ms: float = 0.0

    def to_dict(self):
        out = dict(self.__dict__)
        out["witnesses"] = {
            k: {
                "log2_values": [float(v) for v in w.log2_values],
                "multiplicities": [str(m) for m in w.multiplicities],
                "achieved_distance": d,
            }
            for k, (w, d) in self.witnesses.items()
        }
        return out


def build_report(inst, cap_bits=hashing.SEED_CAP_BITS, sample_rng=None):
    """Aggregate bounds, exact distance, key length and rate for ``inst``.

    Above the enumeration cap ``exact_d`` is left as None; pass
    ``sample_rng`` to get a Monte Carlo estimate instead.
    """
    t0 = time.perf_counter()
    src = inst.source
    eps_bar = inst.eps / 4.0
    hinf, h0 = smoothed_entropies(src, eps_bar)
    ent = {
        "S2_cq": collision_entropy(src),
        "S0_adv": adversary_rank_entropy(src),
        "Sinf_eps_cq": hinf.value,
        "S0_eps_adv": h0.value,
        "S_cq": entropy.von_neumann(cq_spectrum(src)),
        "S_adv": entropy.von_neumann(adversary_spectrum(src)),
    }
    thm1 = theorem1_bound(inst)
    cor1 = 0.5 * 2.0 ** (-0.5 * (hinf.value - h0.value - inst.s)) + 2.0 * eps_bar
    try:
        exact = exact_key_distance(inst, cap_bits)
    except SeedSpaceTooLarge:
        exact = None
    sampled = stderr = None
    if exact is None and sample_rng is not None:
        try:
            sampled, stderr = sampled_key_distance(inst, sample_rng)
        except SeedSpaceTooLarge:
            pass
    if inst.eps > 0:
        rhs = key_length_rhs(inst)
        key_len = extractable_key_length(inst)
    else:
        rhs, key_len = None, 0
    thm1_pass = None if exact is None else exact <= thm1 + EXACT_TOL
    cor1_pass = None if exact is None else exact <= cor1 + EXACT_TOL
    eps_secure = None if exact is None else exact <= inst.eps + EXACT_TOL
    finite = all(math.isfinite(v) for v in ent.values())
    passed = finite and thm1_pass is not False and cor1_pass is not False
    return SecurityReport(
        n=inst.n,
        s=inst.s,
        eps=inst.eps,
        family=inst.family.kind,
        exact_d=exact,
        thm1_bound=thm1,
        cor1_bound=cor1,
        key_len=key_len,
        key_len_rhs=rhs,
        rate=asymptotic_rate(src),
        entropies=ent,
        thm1_pass=thm1_pass,
        cor1_pass=cor1_pass,
        eps_secure=eps_secure,
        passed=passed,
        sampled_d=sampled,
        sampled_d_stderr=stderr,
        witnesses={
            "Sinf_eps_cq": (hinf.witness, hinf.achieved_distance),
            "S0_eps_adv": (h0.witness, h0.achieved_distance),
        },
        runtime_ms=1000.0 * (time.perf_counter() - t0),
    )
