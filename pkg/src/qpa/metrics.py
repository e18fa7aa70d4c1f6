"""Distance measures between distributions and density operators.

``nonuniformity`` and ``hs_nonuniformity`` compare a cq state with the ideal
state in which the classical value is uniform and independent of the
adversary.  Both states are block diagonal in the classical basis, so the
default path works block by block; ``blockwise=False`` builds the full
operators instead and is kept as an independent route for testing.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg, states
from .errors import DimensionMismatch, RangeMismatch


def _probs(P):
    return P.probs if isinstance(P, states.ClassicalDistribution) else np.asarray(P, dtype=float)


def variational_distance(P, Q):
    """Half the L1 distance between two distributions on the same range."""
    p, q = _probs(P), _probs(Q)
    if p.shape != q.shape:
        raise RangeMismatch("ranges of size %d and %d" % (p.size, q.size))
    return 0.5 * float(np.sum(np.abs(p - q)))


@dataclass(frozen=True)
class Coupling:
    """Joint distribution ``joint[x, x']`` with prescribed marginals."""

    joint: np.ndarray

    @property
    def mismatch_probability(self):
        """``Pr[X != X']``."""
        return float(np.sum(self.joint) - np.trace(self.joint))

    def marginals(self):
        return self.joint.sum(axis=1), self.joint.sum(axis=0)


def maximal_coupling(P, Q):
    """Coupling of ``P`` and ``Q`` that disagrees with probability ``delta(P, Q)``.

    The diagonal carries ``min(P, Q)``; the residual masses ``P - min`` and
    ``Q - min`` live on disjoint supports and are matched greedily in index
    order (a north-west-corner transport plan).
    """
    p, q = _probs(P), _probs(Q)
    if p.shape != q.shape:
        raise RangeMismatch("ranges of size %d and %d" % (p.size, q.size))
    k = p.size
    joint = np.diag(np.minimum(p, q))
    rp = p - np.minimum(p, q)
    rq = q - np.minimum(p, q)
    i = j = 0
    while i < k and j < k:
        if rp[i] <= 0.0:
            i += 1
            continue
        if rq[j] <= 0.0:
            j += 1
            continue
        m = min(rp[i], rq[j])
        joint[i, j] += m
        rp[i] -= m
        rq[j] -= m
    return Coupling(joint)


def _same_dim(rho, sigma):
    A = linalg.as_matrix(rho)
    B = linalg.as_matrix(sigma)
    if A.shape != B.shape:
        raise DimensionMismatch("operators of shape %r and %r" % (A.shape, B.shape))
    return A, B


def trace_distance(rho, sigma, method="lapack"):
    """``(1/2) tr|rho - sigma|``."""
    A, B = _same_dim(rho, sigma)
    return 0.5 * linalg.trace_norm(A - B, method=method)


def hs_square_distance(rho, sigma):
    """``tr((rho - sigma)^2)`` as a squared Frobenius norm."""
    A, B = _same_dim(rho, sigma)
    return float(np.sum(np.abs(A - B) ** 2))


def ideal_state(e):
    """``[{U}] (x) [rho]`` for ``U`` uniform on the ensemble's values."""
    k = e.size
    return linalg.kron(np.eye(k) / k, states.average_density(e))


def deviation_blocks(e):
    """Diagonal blocks ``P(x) rho_x - [rho]/|X|`` of (cq state - ideal state)."""
    return e.weighted_blocks() - states.average_density(e)[None, :, :] / e.size


def nonuniformity(e, blockwise=True):
    """Trace distance between the cq state and the uniform, independent ideal."""
    if not blockwise:
        return trace_distance(states.cq_state(e), ideal_state(e))
    w = linalg.eigvalsh_batch(deviation_blocks(e))
    return 0.5 * float(np.sum(np.abs(w)))


def hs_nonuniformity(e, blockwise=True):
    """Squared Hilbert-Schmidt distance between the cq state and the ideal."""
    if not blockwise:
        return hs_square_distance(states.cq_state(e), ideal_state(e))
    return float(np.sum(np.abs(deviation_blocks(e)) ** 2))


def hs_nonuniformity_closed_form(e):
    """``tr(sum_x P(x)^2 rho_x^2 - [rho]^2 / |X|)``.

    Uses only traces of products, never the difference operator.
    """
    avg = states.average_density(e)
    purities = np.real(np.einsum("xij,xji->x", e.rhos, e.rhos))
    return float(np.sum(e.probs ** 2 * purities) - np.real(np.trace(avg @ avg)) / e.size)
