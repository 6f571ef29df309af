"""Random matrix product states: sampling, statistics, dense references."""

from .dense import (
    DENSE_AMPLITUDE_CAP,
    DENSITY_DIM_CAP,
    DenseState,
    DensityMatrix,
    cue_global_entanglement,
    cue_min_eigenvalue,
    cue_purity_moment,
    global_entanglement,
    haar_dense_state,
    haar_twirl_monte_carlo,
    hs_distance,
    maximally_mixed,
    min_eigenvalue,
    partial_trace,
    permutation_twirl,
    projector,
    purity_moment,
    trace_distance,
    typicality_bound,
)
from .errors import CapExceededError, DimensionError
from .haar import Seed, as_seed, generator, ginibre, haar_state, haar_unitary, \
    require_unitary, subseed
from .mps import (
    LocalObservable,
    Mps,
    a_matrices_from_unitary,
    load_mps,
    overlap,
    sample_rmps,
    save_mps,
    transfer_identity,
    transfer_observable,
)

__version__ = "0.1.0"
