"""Ensemble statistics over random states.

Samples are drawn from either of two sources: sequentially generated
random matrix product states, or Haar-random pure states on the full
chain Hilbert space (the large-dimension reference the tensor ensemble
is compared against).  Sample i of an ensemble is always derived from
subseed(master_seed, i), so results are independent of batching or
evaluation order and any subset of samples can be reproduced in
isolation.

Estimators report a value, an uncertainty and, where the statistic is a
plain per-sample average, the per-sample values.  Uncertainties are
sample-stddev / sqrt(r) for per-sample averages, leave-one-out
jackknife for statistics that are nonlinear functions of the whole
sample (state-average distances, the pairwise purity estimator), and
the fourth-moment delta formula for reported standard deviations.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import dense
from .dense import DENSITY_DIM_CAP, DenseState, DensityMatrix
from .errors import DimensionError
from .haar import Seed, as_seed, subseed
from .mps import Mps, LocalObservable, sample_rmps


@dataclass(frozen=True)
class RmpsSource:
    """Random matrix product state ensemble parameters."""

    n_sites: int
    phys_dim: int = 2
    bond_dim: int = 2
    homogeneous: bool = False
    boundary: str = "obc"

    def __post_init__(self) -> None:
        if self.n_sites < 1 or self.phys_dim < 1 or self.bond_dim < 1:
            raise DimensionError(f"invalid source dimensions: {self}")
        if self.boundary not in ("obc", "pbc"):
            raise ValueError(f"boundary must be 'obc' or 'pbc', got {self.boundary!r}")


@dataclass(frozen=True)
class CueSource:
    """Haar-random pure states on a chain of the given site dimensions."""

    site_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.site_dims)
        if len(dims) == 0 or any(d < 1 for d in dims):
            raise DimensionError(f"site dims must be positive integers, got {dims}")
        object.__setattr__(self, "site_dims", dims)


Source = RmpsSource | CueSource


def source_dims(source: Source) -> tuple[int, ...]:
    if isinstance(source, RmpsSource):
        return (source.phys_dim,) * source.n_sites
    return source.site_dims


def total_dim(source: Source) -> int:
    return math.prod(source_dims(source))


@dataclass(frozen=True)
class EnsembleSpec:
    """An ensemble: a source, a sample count and a master seed."""

    source: Source
    r: int
    master_seed: Seed

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError(f"sample count must be positive, got {self.r}")
        object.__setattr__(self, "master_seed", as_seed(self.master_seed))


@dataclass
class EnsembleReport:
    """Result of one ensemble estimator."""

    spec: EnsembleSpec
    estimator: str
    value: float
    stderr: float
    per_sample: np.ndarray | None = None
    wall_time: float = 0.0


@dataclass(frozen=True)
class Histogram:
    """Fixed-range histogram with its bin edges and total count."""

    bin_edges: np.ndarray
    counts: np.ndarray
    total: int

    def __post_init__(self) -> None:
        edges = np.asarray(self.bin_edges, dtype=float)
        counts = np.asarray(self.counts, dtype=np.int64)
        if edges.ndim != 1 or counts.ndim != 1 or edges.size != counts.size + 1:
            raise DimensionError("histogram needs len(bin_edges) == len(counts) + 1")
        if int(counts.sum()) != self.total:
            raise ValueError(f"histogram counts sum to {counts.sum()}, expected {self.total}")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)


# -- sampling ---------------------------------------------------------------


def draw_mps(spec: EnsembleSpec, index: int) -> Mps:
    """Sample ``index`` of a matrix product state ensemble."""
    src = spec.source
    if not isinstance(src, RmpsSource):
        raise TypeError("draw_mps needs a matrix product state source")
    if not 0 <= index < spec.r:
        raise ValueError(f"sample index {index} outside [0, {spec.r})")
    return sample_rmps(src.n_sites, src.phys_dim, src.bond_dim,
                       subseed(spec.master_seed, index),
                       homogeneous=src.homogeneous, boundary=src.boundary)


def draw_dense(spec: EnsembleSpec, index: int) -> DenseState:
    """Sample ``index`` as a normalized dense state (either source)."""
    src = spec.source
    if isinstance(src, CueSource):
        if not 0 <= index < spec.r:
            raise ValueError(f"sample index {index} outside [0, {spec.r})")
        return dense.haar_dense_state(src.site_dims, subseed(spec.master_seed, index))
    return draw_mps(spec, index).to_dense().normalized()


# -- uncertainty helpers ----------------------------------------------------


def _mean_report(spec, name, values, t0) -> EnsembleReport:
    values = np.asarray(values, dtype=float)
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return EnsembleReport(spec, name, float(values.mean()), se, values,
                          time.perf_counter() - t0)


def _jackknife_se(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    r = values.size
    if r < 2:
        return 0.0
    return float(math.sqrt((r - 1) / r * np.sum((values - values.mean()) ** 2)))


def _stddev_se(values: np.ndarray) -> float:
    """Delta-method standard error of the sample standard deviation."""
    values = np.asarray(values, dtype=float)
    r = values.size
    s = float(values.std(ddof=1))
    if s == 0.0:
        return 0.0
    centered = values - values.mean()
    m2 = float(np.mean(centered**2))
    m4 = float(np.mean(centered**4))
    var_s2 = max(m4 - m2 * m2, 0.0) / r
    return math.sqrt(var_s2) / (2.0 * s)


# -- estimators -------------------------------------------------------------


def empirical_average_state(spec: EnsembleSpec,
                            cap: int = DENSITY_DIM_CAP) -> DensityMatrix:
    """Mean projector (1/r) sum_i |psi_i><psi_i| over the ensemble."""
    d = total_dim(spec.source)
    dense.check_density_cap(d, cap)
    acc = np.zeros((d, d), dtype=np.complex128)
    for i in range(spec.r):
        psi = draw_dense(spec, i).amplitudes
        acc += np.outer(psi, psi.conj())
    acc /= spec.r
    acc = (acc + acc.conj().T) / 2.0
    return DensityMatrix(source_dims(spec.source), acc)


def average_state_distance(spec: EnsembleSpec, norm: str = "trace",
                           cap: int = DENSITY_DIM_CAP) -> EnsembleReport:
    """Distance of the empirical average state from maximal mixedness.

    The statistic is a nonlinear function of the whole sample, so the
    uncertainty is a leave-one-out jackknife over the r states.
    """
    metric = _metric(norm)
    t0 = time.perf_counter()
    d = total_dim(spec.source)
    dense.check_density_cap(d, cap)
    states = np.empty((spec.r, d), dtype=np.complex128)
    for i in range(spec.r):
        states[i] = draw_dense(spec, i).amplitudes
    avg = states.T @ states.conj() / spec.r
    target = np.eye(d, dtype=np.complex128) / d
    value = metric(avg, target)
    if spec.r > 1:
        loo = np.empty(spec.r)
        for i in range(spec.r):
            rho_i = np.outer(states[i], states[i].conj())
            loo[i] = metric((spec.r * avg - rho_i) / (spec.r - 1), target)
        se = _jackknife_se(loo)
    else:
        se = 0.0
    return EnsembleReport(spec, f"average_state_distance[{norm}]",
                          float(value), se, None, time.perf_counter() - t0)


def _metric(norm: str) -> Callable[[np.ndarray, np.ndarray], float]:
    if norm == "trace":
        return dense.trace_distance
    if norm == "hs":
        return dense.hs_distance
    raise ValueError(f"norm must be 'trace' or 'hs', got {norm!r}")


def _reduced(spec: EnsembleSpec, index: int, length: int) -> np.ndarray:
    src = spec.source
    if isinstance(src, RmpsSource):
        return draw_mps(spec, index).reduced_density_matrix(0, length).matrix
    return dense.partial_trace(draw_dense(spec, index), range(length)).matrix


def subsystem_distance_stats(spec: EnsembleSpec, length: int, norm: str = "trace",
                             reference: str = "exact") -> EnsembleReport:
    """Mean distance of the leading-block reduced states from a reference.

    The block is the first ``length`` sites.  ``reference`` picks the
    comparison state: "exact" is the maximally mixed state, "empirical"
    the average of the sampled reduced states themselves.
    """
    dims = source_dims(spec.source)
    if not 1 <= length <= len(dims):
        raise DimensionError(f"block length {length} outside [1, {len(dims)}]")
    metric = _metric(norm)
    t0 = time.perf_counter()
    block_dim = math.prod(dims[:length])
    if reference == "exact":
        ref = np.eye(block_dim, dtype=np.complex128) / block_dim
    elif reference == "empirical":
        acc = np.zeros((block_dim, block_dim), dtype=np.complex128)
        for i in range(spec.r):
            acc += _reduced(spec, i, length)
        ref = acc / spec.r
    else:
        raise ValueError(f"reference must be 'exact' or 'empirical', got {reference!r}")
    dists = np.empty(spec.r)
    for i in range(spec.r):
        dists[i] = metric(_reduced(spec, i, length), ref)
    return _mean_report(spec, f"subsystem_distance[{norm},{reference}]", dists, t0)


def purity_of_average_via_overlaps(spec: EnsembleSpec) -> EnsembleReport:
    """Cross term of Tr[(average state)^2] from pairwise overlaps.

    The purity of the empirical average splits exactly into
    1/r + (1/r^2) sum_{i != j} |<psi_i|psi_j>|^2 / (n_i n_j); the
    report value is the second (cross) term, and adding 1/r recovers
    the full purity.  The cross term is what carries the scaling with
    the Hilbert space dimension once r is large enough.

    Never materializes dense states for tensor ensembles: all r(r-1)/2
    overlaps come from batched one-against-many contraction sweeps.
    The uncertainty is a leave-one-state-out jackknife.
    """
    t0 = time.perf_counter()
    r = spec.r
    row_sums = np.zeros(r)
    src = spec.source
    if isinstance(src, CueSource):
        states = np.empty((r, total_dim(src)), dtype=np.complex128)
        for i in range(r):
            states[i] = draw_dense(spec, i).amplitudes
        for i in range(r - 1):
            w = np.abs(states[i + 1:] @ states[i].conj()) ** 2
            row_sums[i] += w.sum()
            row_sums[i + 1:] += w
    elif src.boundary == "obc":
        n, d, chi = src.n_sites, src.phys_dim, src.bond_dim
        tensors = np.empty((r, n, d, chi, chi), dtype=np.complex128)
        rights = np.empty((r, chi), dtype=np.complex128)
        norms = np.empty(r)
        for i in range(r):
            m = draw_mps(spec, i)
            for k in range(n):
                tensors[i, k] = m.tensors[k]
            rights[i] = m.right_vec
            norms[i] = m.norm_squared()
        for i in range(r - 1):
            v = np.einsum("mb,c->mbc", rights[i + 1:], rights[i].conj())
            for k in range(n - 1, -1, -1):
                v = np.einsum("msab,mbc->msac", tensors[i + 1:, k], v, optimize=True)
                v = np.einsum("msac,sdc->mad", v, tensors[i, k].conj(), optimize=True)
            # sampled chains fix the left boundary to the first basis vector
            w = np.abs(v[:, 0, 0]) ** 2 / (norms[i + 1:] * norms[i])
            row_sums[i] += w.sum()
            row_sums[i + 1:] += w
    else:
        from .mps import overlap
        samples = [draw_mps(spec, i) for i in range(r)]
        norms = np.array([m.norm_squared() for m in samples])
        for i in range(r - 1):
            for j in range(i + 1, r):
                w = abs(overlap(samples[i], samples[j])) ** 2 / (norms[i] * norms[j])
                row_sums[i] += w
                row_sums[j] += w
    cross = float(row_sums.sum()) / r**2
    if r > 2:
        loo = (row_sums.sum() - 2.0 * row_sums) / (r - 1) ** 2
        se = _jackknife_se(loo)
    else:
        se = 0.0
    return EnsembleReport(spec, "purity_of_average_cross_term", cross, se, None,
                          time.perf_counter() - t0)


def purity_relative_error(spec: EnsembleSpec, report: EnsembleReport) -> float:
    """Relative deviation of the cross term from the maximally mixed purity.

    ((cross term) - 1/dim) * dim for the report produced by
    purity_of_average_via_overlaps; zero means the average state's
    purity is exactly on the 1/r + 1/dim floor.
    """
    d = total_dim(spec.source)
    return (report.value - 1.0 / d) * d


def q_statistics(spec: EnsembleSpec, bins: int = 100
                 ) -> tuple[Histogram, EnsembleReport, EnsembleReport]:
    """Distribution of the average-purity entanglement measure Q.

    Per sample, Q = 2 - (2/N) sum_k Tr(rho_k^2) over the one-site
    reduced states; sites must be qubits.  Returns the histogram of the
    r values on [0, 1], the mean report, and the standard deviation
    report (its stderr from the fourth-moment delta formula).
    """
    dims = source_dims(spec.source)
    if any(d != 2 for d in dims):
        raise DimensionError(f"Q is defined for qubit chains, got site dims {dims}")
    if spec.r < 2:
        raise ValueError("Q statistics need at least two samples")
    t0 = time.perf_counter()
    n = len(dims)
    qs = np.empty(spec.r)
    for i in range(spec.r):
        if isinstance(spec.source, RmpsSource):
            rhos = draw_mps(spec, i).site_density_matrices()
            purities = np.einsum("kij,kji->k", rhos, rhos).real
        else:
            state = draw_dense(spec, i)
            purities = np.empty(n)
            psi = state.amplitudes.reshape(dims)
            for k in range(n):
                t = np.moveaxis(psi, k, 0).reshape(2, -1)
                rho = t @ t.conj().T
                purities[k] = np.einsum("ij,ji->", rho, rho).real
        qs[i] = 2.0 - 2.0 * purities.mean()
    # Q lies in [0, 1] exactly; clip the ~1e-16 roundoff excursions so
    # every sample lands in a bin and the histogram total stays r.
    counts, edges = np.histogram(np.clip(qs, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    hist = Histogram(edges, counts, int(counts.sum()))
    wall = time.perf_counter() - t0
    mean_rep = _mean_report(spec, "q_mean", qs, t0)
    std_rep = EnsembleReport(spec, "q_stddev", float(qs.std(ddof=1)),
                             _stddev_se(qs), qs, wall)
    return hist, mean_rep, std_rep


def _split_length(dims: tuple[int, ...], d_a: int) -> int:
    """Number of leading sites whose dimensions multiply to d_a."""
    prod = 1
    for k, d in enumerate(dims):
        prod *= d
        if prod == d_a:
            return k + 1
        if prod > d_a:
            break
    raise DimensionError(f"d_a = {d_a} is not a leading-block dimension of {dims}")


def moment_comparison(spec: EnsembleSpec, d_a: int, m: int) -> EnsembleReport:
    """Deviation of the mean subsystem moment Tr(rho_A^m) from the
    exact Haar value for the same bipartition.

    rho_A is the leading block of dimension d_a.  The report value is
    |ensemble mean - exact|; the per-sample moments are attached, so
    the raw mean is recoverable.
    """
    dims = source_dims(spec.source)
    length = _split_length(dims, d_a)
    d_b = total_dim(spec.source) // d_a
    exact = dense.cue_purity_moment(m, d_a, d_b)
    t0 = time.perf_counter()
    vals = np.empty(spec.r)
    for i in range(spec.r):
        vals[i] = dense.purity_moment(_reduced(spec, i, length), m)
    rep = _mean_report(spec, f"moment_deviation[m={m},d_a={d_a}]", vals, t0)
    rep.value = abs(rep.value - exact)
    return rep


def min_eig_comparison(spec: EnsembleSpec, d_a: int) -> EnsembleReport:
    """Deviation of the mean smallest subsystem eigenvalue from the
    1/d_a^3 reference (exact only for the balanced split).

    Same conventions as moment_comparison.
    """
    dims = source_dims(spec.source)
    length = _split_length(dims, d_a)
    exact = dense.cue_min_eigenvalue(d_a)
    t0 = time.perf_counter()
    vals = np.empty(spec.r)
    for i in range(spec.r):
        vals[i] = dense.min_eigenvalue(_reduced(spec, i, length))
    rep = _mean_report(spec, f"min_eig_deviation[d_a={d_a}]", vals, t0)
    rep.value = abs(rep.value - exact)
    return rep


def concentration_scan(observable: LocalObservable,
                       chi_rule: Callable[[int], int] | Mapping[int, int],
                       n_values: Sequence[int], r: int, seed: Seed | int,
                       homogeneous: bool = False, boundary: str = "obc"
                       ) -> list[EnsembleReport]:
    """Spread of a local expectation value across chain lengths.

    For each n in ``n_values`` an ensemble of r states with bond
    dimension chi_rule(n) is drawn (master seed subseed(seed, n)) and
    the sample standard deviation of <observable> is reported, with a
    delta-method stderr and the per-sample values attached.
    """
    rule = chi_rule if callable(chi_rule) else chi_rule.__getitem__
    seed = as_seed(seed)
    out = []
    for n in n_values:
        if observable.start_site + observable.n_sites > n:
            raise DimensionError(f"observable does not fit in a chain of {n} sites")
        chi = int(rule(n))
        spec = EnsembleSpec(
            RmpsSource(n, observable.phys_dim, chi, homogeneous, boundary),
            r, subseed(seed, n))
        t0 = time.perf_counter()
        vals = np.empty(r)
        for i in range(r):
            vals[i] = draw_mps(spec, i).expectation(observable)
        out.append(EnsembleReport(spec, f"concentration[n={n},chi={chi}]",
                                  float(vals.std(ddof=1)), _stddev_se(vals),
                                  vals, time.perf_counter() - t0))
    return out
