"""Renyi entropies and their epsilon-smoothed versions, in bits.

Everything here works on a :class:`Spectrum`: eigenvalues kept as base-2
logarithms together with exact integer multiplicities.  This lets the same
code handle a 4x4 density matrix and the 2**1024-dimensional spectrum of
``rho`` tensored with itself 1024 times, whose smallest eigenvalues underflow
in linear scale.

Smoothing is restricted to operators diagonal in ``rho``'s eigenbasis, which
makes both optimisations one-dimensional:

* ``S_0``: drop the smallest eigenvalues while their total mass fits in the
  budget, and move that mass onto the largest eigenvalue.
* ``S_inf``: find the lowest cap ``c`` whose clipped excess fits in the
  budget, then pour the excess into eigenvalues below ``c``.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .errors import InvalidAlpha, InvalidEpsilon, TooLarge

SPECTRUM_TERM_CAP = 10**7
GROUP_RTOL = 1e-12
BISECTION_STEPS = 60


def _log2_int(m):
    return math.log2(m) if m > 0 else -math.inf


def _log2_ints(ms):
    """Elementwise ``log2`` of nonnegative Python ints of any size."""
    if not ms:
        return np.zeros(0)
    if max(ms) < 1 << 53:
        with np.errstate(divide="ignore"):
            return np.log2(np.array(ms, dtype=float))
    return np.array([_log2_int(m) for m in ms], dtype=float)


def _floor_pow2(x):
    """``floor(2**x)`` as an exact int for any finite ``x >= 0``."""
    if x < 1000:
        return int(math.floor(2.0**x))
    shift = int(x) - 900
    return int(math.floor(2.0 ** (x - shift))) << shift


def _logsumexp2(a):
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return -math.inf
    top = float(np.max(a))
    if top == -math.inf:
        return -math.inf
    return top + math.log2(math.fsum(2.0 ** (a - top)))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Positive eigenvalues with multiplicities, plus the ambient dimension.

    ``log2_values`` is sorted descending.  Eigenvalues that are exactly zero
    are not listed; there are ``dim - rank`` of them.
    """

    log2_values: np.ndarray
    multiplicities: tuple
    dim: int

    @classmethod
    def from_eigenvalues(cls, eigenvalues, dim=None, rel_tol=linalg.RANK_TOL):
        """Build from raw eigenvalues; values below ``rel_tol * max`` count as zero."""
        w = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
        dim = len(w) if dim is None else dim
        if w.size == 0 or w[0] <= 0.0:
            raise ValueError("spectrum has no positive eigenvalue")
        w = w[w > rel_tol * w[0]]
        starts = np.concatenate(([0], np.flatnonzero(-np.diff(w) > GROUP_RTOL * w[0]) + 1))
        counts = np.diff(np.append(starts, w.size))
        vals = np.add.reduceat(w, starts) / counts
        return cls(np.log2(vals), tuple(int(c) for c in counts), dim)

    @classmethod
    def of(cls, rho):
        """Spectrum of a density matrix (or pass-through for a Spectrum)."""
        if isinstance(rho, Spectrum):
            return rho
        M = linalg.check_hermitian(rho)
        return cls.from_eigenvalues(np.linalg.eigvalsh(M), dim=M.shape[0])

    @property
    def eigenvalues(self):
        return 2.0**self.log2_values

    @cached_property
    def log2_multiplicities(self):
        return _log2_ints(self.multiplicities)

    @cached_property
    def log2_masses(self):
        """``log2(m_i * lambda_i)`` per group."""
        return self.log2_values + self.log2_multiplicities

    def masses(self):
        return 2.0**self.log2_masses

    def total(self):
        return math.fsum(self.masses())

    @property
    def rank(self):
        return sum(self.multiplicities)

    @property
    def log2_lambda_max(self):
        return float(self.log2_values[0])

    def expand(self):
        """Explicit eigenvalue list (only sensible for small spectra)."""
        return np.repeat(self.eigenvalues, self.multiplicities)


@dataclass(frozen=True, eq=False)
class SmoothingResult:
    """Smoothed entropy value, the witness spectrum and its distance to ``rho``."""

    value: float
    witness: Spectrum
    achieved_distance: float


def renyi_entropy(rho, alpha):
    """Renyi entropy of order ``alpha`` in bits; ``alpha`` may be ``inf``.

    ``alpha = 0`` counts the (thresholded) rank, ``alpha = 1`` is the von
    Neumann entropy, ``alpha = inf`` is ``-log2 lambda_max``.
    """
    alpha = float(alpha)
    if not alpha >= 0.0:
        raise InvalidAlpha("alpha must be >= 0, got %r" % alpha)
    sp = Spectrum.of(rho)
    if alpha == 0.0:
        return _log2_int(sp.rank)
    if alpha == 1.0:
        return von_neumann(sp)
    if math.isinf(alpha):
        return -sp.log2_lambda_max
    return _logsumexp2(sp.log2_multiplicities + alpha * sp.log2_values) / (1.0 - alpha)


def von_neumann(rho):
    """``-sum lambda log2 lambda`` with ``0 log 0 = 0``."""
    sp = Spectrum.of(rho)
    return float(-math.fsum(sp.masses() * sp.log2_values))


def monotonicity_check(rho, alpha, beta, tol=1e-9):
    """True iff ``S_alpha(rho) >= S_beta(rho) - tol`` (expects ``alpha <= beta``)."""
    return renyi_entropy(rho, alpha) >= renyi_entropy(rho, beta) - tol


def _check_eps(eps):
    eps = float(eps)
    if not 0.0 <= eps < 1.0:
        raise InvalidEpsilon("epsilon must lie in [0, 1), got %r" % eps)
    return eps


def smooth_renyi_0(rho, eps):
    """Upper estimate of ``S_0^eps``: minimum log-rank within trace distance ``eps``."""
    eps = _check_eps(eps)
    sp = Spectrum.of(rho)
    if eps == 0.0:
        return SmoothingResult(_log2_int(sp.rank), sp, 0.0)
    vals = list(sp.log2_values[::-1])
    mults = list(sp.multiplicities[::-1])
    removed = [0] * len(vals)
    budget = eps
    removed_mass = 0.0
    for i, (lv, m) in enumerate(zip(vals, mults)):
        avail = m - 1 if i == len(vals) - 1 else m
        if avail <= 0:
            break
        group_mass = 2.0 ** (lv + _log2_int(avail))
        if group_mass <= budget:
            removed[i] = avail
            budget -= group_mass
            removed_mass += group_mass
            continue
        if budget > 0.0:
            x = math.log2(budget) - lv
            k = _floor_pow2(x) if x >= 0 else 0
            k = min(k, avail)
            # rounding in 2**x may overshoot; back off relatively for huge k
            while k > 0 and 2.0 ** (lv + math.log2(k)) > budget:
                k -= max(1, k >> 40)
            if k:
                mass = 2.0 ** (lv + math.log2(k))
                removed[i] = k
                removed_mass += mass
        break
    kept = sp.rank - sum(removed)
    witness = _s0_witness(vals, mults, removed, removed_mass, sp.dim)
    return SmoothingResult(_log2_int(kept), witness, removed_mass)


def _s0_witness(vals_asc, mults_asc, removed, removed_mass, dim):
    groups = []
    for lv, m, r in zip(vals_asc, mults_asc, removed):
        if m - r > 0:
            groups.append([lv, m - r])
    top_lv, top_m = groups[-1]
    boosted = math.log2(2.0**top_lv + removed_mass)
    if top_m > 1:
        groups[-1][1] = top_m - 1
        groups.append([boosted, 1])
    else:
        groups[-1][0] = boosted
    groups.sort(key=lambda g: -g[0])
    return Spectrum(np.array([g[0] for g in groups]), tuple(g[1] for g in groups), dim)


def _clipped_mass(sp, log2_cap):
    """Total excess ``sum m * max(lambda - c, 0)``."""
    above = sp.log2_values > log2_cap
    if not np.any(above):
        return 0.0
    excess = 2.0 ** sp.log2_masses[above] - 2.0 ** (sp.log2_multiplicities[above] + log2_cap)
    return max(math.fsum(excess), 0.0)


def smooth_renyi_inf(rho, eps):
    """Lower estimate of ``S_inf^eps``: maximum ``-log2 lambda_max`` within ``eps``.

    The cap is bisected on ``log2 c`` over ``[-log2 dim, log2 lambda_max]``;
    the log scale keeps 60 steps meaningful for tensor-power spectra.
    """
    eps = _check_eps(eps)
    sp = Spectrum.of(rho)
    top = sp.log2_lambda_max
    if eps == 0.0:
        return SmoothingResult(-top, sp, 0.0)
    floor = -_log2_int(sp.dim)
    if _clipped_mass(sp, floor) <= eps:
        log_cap = floor
    else:
        lo, hi = floor, top
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if _clipped_mass(sp, mid) <= eps:
                hi = mid
            else:
                lo = mid
        log_cap = hi
    witness, moved = _water_fill(sp, log_cap)
    return SmoothingResult(-log_cap, witness, moved)


def _water_fill(sp, log_cap):
    """Clip at ``c`` and refill below ``c``, largest eigenvalues first."""
    cap = 2.0**log_cap
    excess = _clipped_mass(sp, log_cap)
    moved = excess
    lv = np.asarray(sp.log2_values, dtype=float)
    mults = list(sp.multiplicities)
    above = lv > log_cap
    n_above = int(np.count_nonzero(above))  # log2_values is descending
    below_lv = lv[n_above:]
    below_m = mults[n_above:]
    zeros = sp.dim - sp.rank
    if zeros > 0:
        below_lv = np.append(below_lv, -math.inf)
        below_m = below_m + [zeros]
    full = 0
    if excess > 0:
        log_m = sp.log2_multiplicities[n_above:]
        if zeros > 0:
            log_m = np.append(log_m, _log2_int(zeros))
        with np.errstate(over="ignore", divide="ignore"):
            rooms = np.exp2(log_m + np.log2(cap - np.exp2(below_lv)))
        # groups fully raised to the cap, then at most one partially raised group
        full = int(np.searchsorted(np.cumsum(rooms), excess, side="right"))
    at_cap = sum(mults[:n_above]) + sum(below_m[:full])
    out_lv, out_m = [], []
    if at_cap:
        out_lv.append(log_cap)
        out_m.append(at_cap)
    rest = full
    if excess > 0 and full < len(below_m):
        left = excess - float(np.sum(rooms[:full]))
        if left > 0:
            m = below_m[full]
            out_lv.append(math.log2(2.0 ** below_lv[full] + 2.0 ** (math.log2(left) - _log2_int(m))))
            out_m.append(m)
            rest = full + 1
    # the untouched tail is already descending and below every raised group
    tail_lv = below_lv[rest:]
    tail_m = below_m[rest:]
    if tail_lv.size and tail_lv[-1] == -math.inf:
        tail_lv, tail_m = tail_lv[:-1], tail_m[:-1]
    return (
        Spectrum(np.concatenate([np.array(out_lv, dtype=float), tail_lv]), tuple(out_m) + tuple(tail_m), sp.dim),
        moved,
    )


def smooth_renyi_entropy(rho, alpha, eps):
    """Dispatch for ``alpha`` in ``{0, 1, inf}``; ``S_1^eps`` is ``S`` itself."""
    alpha = float(alpha)
    if alpha == 0.0:
        return smooth_renyi_0(rho, eps).value
    if math.isinf(alpha):
        return smooth_renyi_inf(rho, eps).value
    if alpha == 1.0:
        _check_eps(eps)
        return von_neumann(rho)
    raise InvalidAlpha("smoothing is implemented for alpha in {0, 1, inf}, got %r" % alpha)


def product_spectrum(rho, n, term_cap=SPECTRUM_TERM_CAP):
    """Spectrum of the n-fold tensor power of ``rho`` in compressed form.

    Eigenvalues are ``prod lambda_j ** k_j`` over compositions ``k`` of ``n``
    across the distinct eigenvalues of ``rho``, each with multinomial
    multiplicity.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    base = Spectrum.of(rho)
    if base.dim > 4:
        raise TooLarge("product_spectrum supports dim <= 4, got %d" % base.dim)
    g = len(base.multiplicities)
    terms = math.comb(n + g - 1, g - 1)
    if terms > term_cap:
        raise TooLarge("%d spectrum terms exceed cap %d" % (terms, term_cap))
    logs = base.log2_values
    ms = base.multiplicities
    fact = [1] * (n + 1)
    for i in range(1, n + 1):
        fact[i] = fact[i - 1] * i
    out_logs = []
    out_mults = []
    for comp in _compositions(n, g):
        mult = fact[n]
        for k, m in zip(comp, ms):
            mult //= fact[k]
        for k, m in zip(comp, ms):
            if m != 1:
                mult *= m**k
        out_logs.append(float(np.dot(comp, logs)))
        out_mults.append(mult)
    order = np.argsort(-np.array(out_logs), kind="stable")
    return Spectrum(
        np.array(out_logs)[order],
        tuple(out_mults[i] for i in order),
        base.dim**n,
    )


def _compositions(n, parts):
    if parts == 1:
        yield (n,)
        return
    for k in range(n, -1, -1):
        for rest in _compositions(n - k, parts - 1):
            yield (k,) + rest


def aep_gap(rho, eps, n, alpha):
    """``|S_alpha^eps(rho^{(x)n}) / n - S(rho)|`` for ``alpha`` in ``{0, inf}``."""
    sp = product_spectrum(rho, n)
    rate = smooth_renyi_entropy(sp, alpha, eps) / n
    return abs(rate - von_neumann(rho))
