"""Density operators, classical distributions and classical-quantum ensembles.

A :class:`CqEnsemble` pairs a classical value ``x`` (probability ``P(x)``)
with the adversary's conditional density operator ``rho_x``.  The same type
models a random state over a finite sample space: the values then simply
index the sample points.  The classical basis ``|x>`` follows the order of
``values`` as given.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NotADensityOperator, ZeroProbabilityEvent

TRACE_TOL = 1e-9
PSD_TOL = 1e-9
PROB_TOL = 1e-12
PROB_FLOOR = 1e-15


def check_density(rho, name="rho"):
    """Validate and return ``rho`` as a complex density matrix."""
    try:
        M = linalg.check_hermitian(rho)
    except ValueError as exc:
        raise NotADensityOperator("%s: %s" % (name, exc)) from exc
    tr = np.trace(M).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotADensityOperator("%s: trace %.12g is not 1" % (name, tr))
    lmin = np.linalg.eigvalsh(M)[0] if M.shape[0] > 1 else M[0, 0].real
    if lmin < -PSD_TOL:
        raise NotADensityOperator("%s: negative eigenvalue %.3e" % (name, lmin))
    return M


def _as_probs(probs, name="probs"):
    """Return (float array, exact Fractions or None) after validation."""
    probs = list(probs)
    if not probs:
        raise ValueError("%s: empty distribution" % name)
    exact = None
    if all(isinstance(p, (Fraction, int)) and not isinstance(p, bool) for p in probs):
        exact = tuple(Fraction(p) for p in probs)
        if any(p < 0 for p in exact):
            raise ValueError("%s: negative probability" % name)
        if sum(exact) != 1:
            raise ValueError("%s: probabilities sum to %s, not 1" % (name, sum(exact)))
        arr = np.array([float(p) for p in exact])
    else:
        arr = np.asarray([float(p) for p in probs], dtype=float)
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("%s: probabilities must be finite and nonnegative" % name)
        total = float(np.sum(arr))
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError("%s: probabilities sum to %.15g, not 1" % (name, total))
    return arr, exact


@dataclass(frozen=True, eq=False)
class ClassicalDistribution:
    """Probability vector over a finite ordered range."""

    probs: np.ndarray
    exact: tuple = field(default=None, repr=False)

    def __init__(self, probs):
        arr, exact = _as_probs(probs)
        object.__setattr__(self, "probs", arr)
        object.__setattr__(self, "exact", exact)

    def __len__(self):
        return len(self.probs)

    @classmethod
    def uniform(cls, size):
        return cls([Fraction(1, size)] * size)


@dataclass(frozen=True, eq=False)
class CqEnsemble:
    """Classical random variable with a conditional density operator per value.

    Parameters
    ----------
    values : sequence
        Classical symbols, in basis order.
    probs : sequence
        ``P(x)``; pass ``Fraction``/``int`` entries to keep exact arithmetic.
    conditionals : array_like, shape (len(values), d, d)
        ``rho_x`` for each value (required to be valid even when ``P(x)=0``).
    """

    values: tuple
    probs: np.ndarray
    rhos: np.ndarray
    exact_probs: tuple = field(default=None, repr=False)

    def __init__(self, values, probs, conditionals, validate=True):
        values = tuple(values)
        arr, exact = _as_probs(probs)
        rhos = np.asarray(conditionals, dtype=complex)
        if rhos.ndim != 3 or rhos.shape[1] != rhos.shape[2]:
            raise DimensionMismatch("conditionals must have shape (k, d, d), got %r" % (rhos.shape,))
        if len(values) != len(arr) or rhos.shape[0] != len(arr):
            raise DimensionMismatch(
                "%d values, %d probabilities, %d conditionals"
                % (len(values), len(arr), rhos.shape[0])
            )
        if len(set(values)) != len(values):
            raise ValueError("values must be distinct")
        if validate:
            _check_density_stack(rhos)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", arr)
        object.__setattr__(self, "rhos", rhos)
        object.__setattr__(self, "exact_probs", exact)

    @property
    def size(self):
        return len(self.values)

    @property
    def dim(self):
        return self.rhos.shape[1]

    def index(self, value):
        return self.values.index(value)

    def weighted_blocks(self):
        """``P(x) rho_x`` stacked, i.e. the diagonal blocks of the cq state."""
        return self.probs[:, None, None] * self.rhos

    @classmethod
    def trivial_adversary(cls, probs, values=None):
        """Ensemble whose adversary holds a one-dimensional (empty) system."""
        probs = list(probs)
        values = range(len(probs)) if values is None else values
        return cls(values, probs, np.ones((len(probs), 1, 1)))

    @classmethod
    def perfect_copy(cls, probs, values=None):
        """Adversary holds ``|x><x|``: a perfect classical copy."""
        probs = list(probs)
        k = len(probs)
        values = range(k) if values is None else values
        rhos = np.zeros((k, k, k), dtype=complex)
        rhos[np.arange(k), np.arange(k), np.arange(k)] = 1.0
        return cls(values, probs, rhos, validate=False)


def _check_density_stack(rhos):
    defect = hermitian_defect_stack(rhos)
    scale = max(float(np.max(np.abs(rhos))), 1e-300)
    if defect > linalg.HERM_TOL * scale:
        raise NotADensityOperator("conditionals: hermitian defect %.3e" % defect)
    traces = np.real(np.trace(rhos, axis1=1, axis2=2))
    bad = np.flatnonzero(np.abs(traces - 1.0) > TRACE_TOL)
    if bad.size:
        raise NotADensityOperator("conditionals[%d]: trace %.12g is not 1" % (bad[0], traces[bad[0]]))
    lmin = linalg.eigvalsh_batch(0.5 * (rhos + rhos.conj().swapaxes(1, 2)))[:, 0]
    bad = np.flatnonzero(lmin < -PSD_TOL)
    if bad.size:
        raise NotADensityOperator("conditionals[%d]: negative eigenvalue %.3e" % (bad[0], lmin[bad[0]]))


def hermitian_defect_stack(stack):
    return float(np.max(np.abs(stack - stack.conj().swapaxes(-1, -2)))) if stack.size else 0.0


def average_density(e):
    """``[rho] = sum_x P(x) rho_x``."""
    return np.einsum("x,xij->ij", e.probs, e.rhos)


def event_probability(e, event):
    """``Pr[X in event]``, exact (Fraction) when the ensemble is exact."""
    idx = [e.index(v) for v in event]
    if e.exact_probs is not None:
        return sum((e.exact_probs[i] for i in idx), Fraction(0))
    return float(np.sum(e.probs[idx]))


def conditioned_density(e, event):
    """Density operator conditioned on ``X in event``.

    Raises
    ------
    ZeroProbabilityEvent
        If the event has probability zero (exactly, for exact ensembles) or
        below ``PROB_FLOOR``.
    """
    idx = [e.index(v) for v in event]
    pr = event_probability(e, event)
    if pr == 0 or float(pr) <= PROB_FLOOR:
        raise ZeroProbabilityEvent("event %r has probability %s" % (tuple(event), pr))
    weights = e.probs[idx] / float(pr)
    return np.einsum("x,xij->ij", weights, e.rhos[idx])


def cq_state(e, cap=linalg.DIM_CAP):
    """Block-diagonal operator ``sum_x P(x) |x><x| (x) rho_x``.

    The classical register is the left tensor factor, so block ``x`` occupies
    rows/columns ``x*d : (x+1)*d``.
    """
    k, d = e.size, e.dim
    if k * d > cap:
        raise linalg.DimensionOverflow("cq state dimension %d exceeds cap %d" % (k * d, cap))
    out = np.zeros((k * d, k * d), dtype=complex)
    blocks = e.weighted_blocks()
    for x in range(k):
        out[x * d:(x + 1) * d, x * d:(x + 1) * d] = blocks[x]
    return out


def cq_spectrum(e):
    """Eigenvalues of the cq state (unsorted), read off block by block."""
    return np.clip(linalg.eigvalsh_batch(e.rhos), 0.0, None) * e.probs[:, None]


def embed_classical(P):
    """Diagonal density operator ``sum_x P(x) |x><x|``."""
    probs = P.probs if isinstance(P, ClassicalDistribution) else ClassicalDistribution(P).probs
    return np.diag(probs).astype(complex)


def pushforward(e, labels, outputs):
    """Ensemble of ``f(X)`` where ``labels[i] = f(values[i])``.

    ``outputs`` fixes the range and its order.  Outputs hit with probability
    zero get ``[rho]`` as a placeholder conditional; it never contributes
    because its weight is zero.
    """
    labels = list(labels)
    outputs = tuple(outputs)
    slot = {o: j for j, o in enumerate(outputs)}
    groups = [[] for _ in outputs]
    for v, lab in zip(e.values, labels):
        groups[slot[lab]].append(v)
    avg = average_density(e)
    probs, rhos = [], []
    for group in groups:
        pr = event_probability(e, group) if group else (Fraction(0) if e.exact_probs is not None else 0.0)
        probs.append(pr)
        if pr == 0 or float(pr) <= PROB_FLOOR:
            rhos.append(avg)
        else:
            rhos.append(conditioned_density(e, group))
    if e.exact_probs is None:
        probs = [float(p) for p in probs]
    return CqEnsemble(outputs, probs, np.array(rhos), validate=False)


def product_ensemble(e1, e2):
    """Independent pair ``((x1, x2), rho_x1 (x) rho_x2)``."""
    values = [(a, b) for a in e1.values for b in e2.values]
    if e1.exact_probs is not None and e2.exact_probs is not None:
        probs = [p * q for p in e1.exact_probs for q in e2.exact_probs]
    else:
        probs = np.outer(e1.probs, e2.probs).ravel()
    rhos = np.array([np.kron(a, b) for a in e1.rhos for b in e2.rhos])
    return CqEnsemble(values, probs, rhos, validate=False)


def random_density(rng, dim, rank=None):
    """Random density matrix ``G G^H / tr`` with ``G`` Ginibre of given rank."""
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_rational_probs(rng, size, denominator=64, allow_zero=False):
    """Random exact distribution with integer weights over ``denominator``."""
    low = 0 if allow_zero else 1
    w = rng.integers(low, denominator, size=size)
    if w.sum() == 0:
        w[0] = 1
    total = int(w.sum())
    return [Fraction(int(x), total) for x in w]
