"""Privacy amplification by two-universal hashing against quantum adversaries.

Modules
-------
linalg    Hermitian eigendecomposition, Kronecker products, trace norms
states    density operators, classical-quantum ensembles
metrics   variational / trace / Hilbert-Schmidt distances, non-uniformity
entropy   Renyi and smoothed Renyi entropies, tensor-power spectra
hashing   Toeplitz, GF(2^n) multiplication and all-function hash families
pa        exact key distance, security bounds, key length, key rate
scenario  scenario files and result rows
lemmas    randomized verification of the supporting inequalities
cli       ``qpa`` command line
"""

from .entropy import (
    Spectrum,
    aep_gap,
    product_spectrum,
    renyi_entropy,
    smooth_renyi_0,
    smooth_renyi_inf,
    von_neumann,
)
from .hashing import HashFamily, certify_two_universal, collision_probability
from .metrics import (
    hs_nonuniformity,
    hs_square_distance,
    maximal_coupling,
    nonuniformity,
    trace_distance,
    variational_distance,
)
from .pa import (
    PaInstance,
    SecurityReport,
    asymptotic_rate,
    build_report,
    corollary1_bound,
    exact_key_distance,
    extractable_key_length,
    theorem1_bound,
)
from .states import (
    ClassicalDistribution,
    CqEnsemble,
    average_density,
    conditioned_density,
    cq_state,
    embed_classical,
)

__version__ = "0.1.0"
