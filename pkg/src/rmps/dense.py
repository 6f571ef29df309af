"""Dense reference implementations.

Everything here materializes full state vectors or density matrices, so
it only works for small systems.  It serves two purposes: it is the
ground truth the tensor-network code is tested against, and it hosts
the exact ensemble references (moments of reduced Haar-random states,
typicality bounds, twirl expressions) that the experiments compare to.

Size caps guard against accidentally allocating astronomically large
objects; they can be loosened per call.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, DimensionError
from .haar import Seed, haar_state, haar_unitary, subseed

# Default ceilings: 2^20 amplitudes for a dense pure state and 2^10 for
# the linear dimension of anything stored as a full matrix.
DENSE_AMPLITUDE_CAP = 2**20
DENSITY_DIM_CAP = 2**10


def check_amplitude_cap(total_dim: int, cap: int = DENSE_AMPLITUDE_CAP) -> None:
    if total_dim > cap:
        raise CapExceededError(f"dense state of dimension {total_dim} exceeds cap {cap}")


def check_density_cap(dim: int, cap: int = DENSITY_DIM_CAP) -> None:
    if dim > cap:
        raise CapExceededError(f"density matrix of dimension {dim} exceeds cap {cap}")


def _validated_dims(dims: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if len(out) == 0 or any(d < 1 for d in out):
        raise DimensionError(f"site dimensions must be positive integers, got {out}")
    return out


@dataclass(frozen=True)
class DenseState:
    """Dense pure state of a chain of sites.

    ``dims`` lists the physical dimension of each site and
    ``amplitudes`` holds the coefficients in row-major site order (the
    first site is the slowest-varying index).
    """

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        dims = _validated_dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size != math.prod(dims):
            raise DimensionError(
                f"amplitude count {amps.size} does not match site dims {dims}"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def total_dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "DenseState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return DenseState(self.dims, self.amplitudes / n)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix with per-site dimension metadata."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        dims = _validated_dims(self.dims)
        mat = np.asarray(self.matrix, dtype=np.complex128)
        d = math.prod(dims)
        if mat.shape != (d, d):
            raise DimensionError(f"matrix shape {mat.shape} does not match dims {dims}")
        if np.abs(mat - mat.conj().T).max() > 1e-10:
            raise ValueError("density matrix is not Hermitian within 1e-10")
        tr = np.trace(mat)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace {tr} deviates from 1 beyond 1e-10")
        if np.linalg.eigvalsh(mat)[0] < -1e-10:
            raise ValueError("density matrix has an eigenvalue below -1e-10")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def total_dim(self) -> int:
        return self.matrix.shape[0]


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    """Identity / total dimension on the given sites."""
    dims = _validated_dims(dims)
    d = math.prod(dims)
    check_density_cap(d)
    return DensityMatrix(dims, np.eye(d, dtype=np.complex128) / d)


def haar_dense_state(dims: Sequence[int], seed: Seed | int,
                     cap: int = DENSE_AMPLITUDE_CAP) -> DenseState:
    """Haar-random pure state on a chain with the given site dims."""
    dims = _validated_dims(dims)
    d = math.prod(dims)
    check_amplitude_cap(d, cap)
    return DenseState(dims, haar_state(d, seed))


def projector(state: DenseState) -> np.ndarray:
    """|psi><psi| / <psi|psi> as a bare matrix."""
    v = state.amplitudes
    n2 = np.vdot(v, v).real
    if n2 == 0.0:
        raise ValueError("cannot project the zero state")
    return np.outer(v, v.conj()) / n2


def _as_matrix(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    m = np.asarray(rho, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def partial_trace(obj: DenseState | DensityMatrix, keep: Sequence[int],
                  cap: int = DENSITY_DIM_CAP) -> DensityMatrix:
    """Reduced density matrix on the ``keep`` sites (ascending order).

    Accepts either a pure state or a density matrix.  Pure states are
    normalized before reduction, so the result always has unit trace.
    """
    keep = tuple(sorted(set(int(k) for k in keep)))
    dims = obj.dims
    n = len(dims)
    if len(keep) == 0:
        raise DimensionError("keep must name at least one site")
    if keep != tuple(sorted(set(keep))) or keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"keep sites {keep} out of range for {n} sites")
    traced = tuple(i for i in range(n) if i not in keep)
    kept_dim = math.prod(dims[i] for i in keep)
    check_density_cap(kept_dim, cap)

    if isinstance(obj, DenseState):
        psi = obj.normalized().amplitudes.reshape(dims)
        a = psi.transpose(keep + traced).reshape(kept_dim, -1)
        rho = a @ a.conj().T
    else:
        t = obj.matrix.reshape(dims + dims)
        order = keep + traced
        t = t.transpose(order + tuple(n + i for i in order))
        traced_dim = math.prod(dims[i] for i in traced) if traced else 1
        t = t.reshape(kept_dim, traced_dim, kept_dim, traced_dim)
        rho = np.einsum("itjt->ij", t)
    return DensityMatrix(tuple(dims[i] for i in keep), rho)


def trace_distance(a: DensityMatrix | np.ndarray, b: DensityMatrix | np.ndarray) -> float:
    """Trace norm ||a - b||_1 = sum of singular values of the difference.

    Note the convention: no factor 1/2, so the distance between
    orthogonal pure states is 2.  The difference is sign-canonicalized
    before the eigensolve so that both argument orders hand the solver
    bitwise-identical input and the result is exactly symmetric.
    """
    diff = _as_matrix(a) - _as_matrix(b)
    diff = (diff + diff.conj().T) / 2.0  # difference of Hermitian inputs
    flat = diff.ravel()
    lead = flat[np.argmax(np.abs(flat.real) + np.abs(flat.imag))]
    if lead.real < 0.0 or (lead.real == 0.0 and lead.imag < 0.0):
        diff = -diff
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())


def hs_distance(a: DensityMatrix | np.ndarray, b: DensityMatrix | np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm ||a - b||_2."""
    return float(np.linalg.norm(_as_matrix(a) - _as_matrix(b)))


def purity_moment(rho: DensityMatrix | np.ndarray, m: int) -> float:
    """Tr(rho^m) for integer m >= 1, via the eigenvalues."""
    if m < 1:
        raise ValueError(f"moment order must be a positive integer, got {m}")
    lam = np.linalg.eigvalsh(_as_matrix(rho))
    return float(np.sum(lam**m))


def min_eigenvalue(rho: DensityMatrix | np.ndarray) -> float:
    """Smallest eigenvalue; roundoff negatives above -1e-10 clamp to 0."""
    lam = float(np.linalg.eigvalsh(_as_matrix(rho))[0])
    if -1e-10 <= lam < 0.0:
        return 0.0
    return lam


def global_entanglement(state: DenseState) -> float:
    """Average-purity entanglement measure of a qubit chain.

    Q = 2 - (2/N) sum_k Tr(rho_k^2) with rho_k the one-site reduced
    states.  Zero exactly on product states, 1 on e.g. the GHZ state.
    """
    if any(d != 2 for d in state.dims):
        raise DimensionError(f"global entanglement requires qubit sites, got dims {state.dims}")
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValueError("state must be normalized")
    n = len(state.dims)
    psi = state.amplitudes.reshape(state.dims)
    purity_sum = 0.0
    for k in range(n):
        t = np.moveaxis(psi, k, 0).reshape(2, -1)
        rho = t @ t.conj().T
        purity_sum += float(np.einsum("ij,ji->", rho, rho).real)
    return 2.0 - (2.0 / n) * purity_sum


# ---------------------------------------------------------------------------
# Exact references for states drawn uniformly (Haar measure) on the full
# bipartite space, reduced to a d_a-dimensional subsystem.


def cue_purity_moment(m: int, d_a: int, d_b: int) -> float:
    """Exact ensemble mean of Tr(rho_A^m), m in {2, 3, 4}.

    rho_A is the d_a-dimensional reduction of a Haar-random pure state
    on a d_a * d_b dimensional space.
    """
    if d_a < 1 or d_b < 1:
        raise DimensionError(f"subsystem dims must be positive, got {d_a}, {d_b}")
    n = d_a * d_b
    if m == 2:
        return (d_a + d_b) / (n + 1)
    if m == 3:
        return (d_a**2 + 3 * d_a * d_b + d_b**2 + 1) / ((n + 1) * (n + 2))
    if m == 4:
        num = d_a**3 + 6 * d_a**2 * d_b + 6 * d_a * d_b**2 + d_b**3 + 5 * d_a + 5 * d_b
        return num / ((n + 1) * (n + 2) * (n + 3))
    raise ValueError(f"closed forms implemented for m in {{2, 3, 4}}, got {m}")


def cue_global_entanglement(n_qubits: int) -> float:
    """Exact ensemble mean of Q for Haar-random n-qubit pure states."""
    if n_qubits < 1:
        raise DimensionError(f"qubit count must be positive, got {n_qubits}")
    d = 2**n_qubits
    return (d - 2) / (d + 1)


def cue_min_eigenvalue(d_a: int) -> float:
    """Reference mean of the smallest eigenvalue of rho_A: 1 / d_a^3.

    Exact for the balanced split d_b = d_a; the constant is specific to
    that square case and understates the mean when d_b > d_a.
    """
    if d_a < 1:
        raise DimensionError(f"subsystem dim must be positive, got {d_a}")
    return 1.0 / d_a**3


def typicality_bound(d_s: int, d_b: int) -> float:
    """Bound sqrt(d_s / d_b) on the mean trace distance of a subsystem
    of a Haar-random pure state from its ensemble average."""
    if d_s < 1 or d_b < 1:
        raise DimensionError(f"dims must be positive, got {d_s}, {d_b}")
    return math.sqrt(d_s / d_b)


# ---------------------------------------------------------------------------
# Twirl expressions.  Both return operators on n_copies interleaved
# (ket, bra-conjugate) index pairs, i.e. the index order matches
# kron(U, U.conj()) tensored n_copies times.


def haar_twirl_monte_carlo(n_copies: int, dim: int, r: int, seed: Seed | int,
                           cap: int = DENSITY_DIM_CAP) -> np.ndarray:
    """Monte Carlo estimate of the mean of (U (x) U*)^{(x) n_copies}.

    Averages r independent Haar unitaries, sample i drawn from
    subseed(seed, i).
    """
    if n_copies < 1:
        raise DimensionError(f"n_copies must be positive, got {n_copies}")
    if r < 1:
        raise ValueError(f"sample count must be positive, got {r}")
    op_dim = dim ** (2 * n_copies)
    check_density_cap(op_dim, cap)
    acc = np.zeros((op_dim, op_dim), dtype=np.complex128)
    for i in range(r):
        u = haar_unitary(dim, subseed(seed, i))
        w = np.kron(u, u.conj())
        t = w
        for _ in range(n_copies - 1):
            t = np.kron(t, w)
        acc += t
    return acc / r


def permutation_twirl(n_copies: int, dim: int,
                      cap: int = DENSITY_DIM_CAP) -> np.ndarray:
    """Sum of projectors onto unit-normalized vectorized permutations.

    For each permutation sigma of the n_copies tensor factors, the
    permutation operator P_sigma on (C^dim)^{(x) n_copies} is
    vectorized row-major, normalized to a unit vector, and the
    projectors are summed.  The permutation operators are not mutually
    orthogonal under the Hilbert-Schmidt inner product, so this is not
    a projector and only approximates the exact twirl; it matches it
    exactly at n_copies = 1.

    Indices are reordered to the interleaved convention of
    haar_twirl_monte_carlo so the two can be compared entrywise.
    """
    if n_copies < 1:
        raise DimensionError(f"n_copies must be positive, got {n_copies}")
    op_dim = dim ** (2 * n_copies)
    check_density_cap(op_dim, cap)
    n = n_copies
    ident = np.eye(dim**n, dtype=np.complex128).reshape((dim,) * (2 * n))
    # grouped (a_1..a_n, b_1..b_n) -> interleaved (a_1, b_1, ..., a_n, b_n)
    interleave = tuple(itertools.chain.from_iterable((k, n + k) for k in range(n)))
    out = np.zeros((op_dim, op_dim), dtype=np.complex128)
    for perm in itertools.permutations(range(n)):
        p = ident.transpose(tuple(range(n)) + tuple(n + k for k in perm))
        v = p.transpose(interleave).reshape(-1)
        v = v / np.linalg.norm(v)
        out += np.outer(v, v.conj())
    return out
