"""Matrix product states with sequential Haar-random sampling.

A state is stored as one tensor set per site, ``tensors[k][i]`` being
the bond_dim x bond_dim matrix A^i of site k.  Amplitudes follow the
left-to-right convention

    open chain:  <left| A^{i_1}[1] A^{i_2}[2] ... A^{i_N}[N] |right>
    ring:        Tr( A^{i_1}[1] A^{i_2}[2] ... A^{i_N}[N] )

Sampling cuts the site matrices out of Haar-random unitaries acting on
the physical site plus a bond-space ancilla, which makes every sampled
tensor set an exact isometry sum_i A^i{}^dag A^i = 1.  Contractions
never build the full chi^2 x chi^2 transfer matrices except in the two
functions that expose them; sweeps cost O(N D chi^3) on open chains and
O(N D chi^5) on rings.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dense import DENSE_AMPLITUDE_CAP, DENSITY_DIM_CAP, DenseState, DensityMatrix, \
    check_amplitude_cap, check_density_cap
from .errors import DimensionError
from .haar import Seed, as_seed, haar_state, haar_unitary, require_unitary, subseed

BOUNDARIES = ("obc", "pbc")


@dataclass(frozen=True)
class LocalObservable:
    """A product observable on a contiguous block of sites.

    ``site_ops[j]`` acts on site ``start_site + j``; each operator must
    be Hermitian and share one physical dimension.
    """

    site_ops: tuple[np.ndarray, ...]
    start_site: int

    def __post_init__(self) -> None:
        if self.start_site < 0:
            raise DimensionError(f"start_site must be nonnegative, got {self.start_site}")
        ops = tuple(np.asarray(op, dtype=np.complex128) for op in self.site_ops)
        if len(ops) == 0:
            raise DimensionError("observable needs at least one site operator")
        d = ops[0].shape[0] if ops[0].ndim == 2 else 0
        for op in ops:
            if op.ndim != 2 or op.shape != (d, d):
                raise DimensionError(f"site operators must all be {d} x {d} matrices")
            if np.abs(op - op.conj().T).max() > 1e-12:
                raise ValueError("site operators must be Hermitian within 1e-12")
        object.__setattr__(self, "site_ops", ops)

    @property
    def phys_dim(self) -> int:
        return self.site_ops[0].shape[0]

    @property
    def n_sites(self) -> int:
        return len(self.site_ops)


class Mps:
    """Uniform-bond matrix product state on an open chain or a ring."""

    def __init__(self, tensors, boundary: str = "obc",
                 left_vec: np.ndarray | None = None,
                 right_vec: np.ndarray | None = None,
                 homogeneous: bool = False):
        tensors = list(tensors)
        if len(tensors) == 0:
            raise DimensionError("an MPS needs at least one site")
        shape = np.asarray(tensors[0]).shape
        if len(shape) != 3 or shape[1] != shape[2]:
            raise DimensionError(f"site tensors must have shape (D, chi, chi), got {shape}")
        for k, t in enumerate(tensors):
            t = np.asarray(t)
            if t.shape != shape:
                raise DimensionError(f"site {k} tensor shape {t.shape} differs from {shape}")
        if homogeneous and any(t is not tensors[0] for t in tensors):
            raise ValueError("homogeneous states must alias a single tensor set")
        if boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")

        chi = shape[1]
        if boundary == "obc":
            if left_vec is None or right_vec is None:
                raise ValueError("open chains need both boundary vectors")
            left_vec = np.asarray(left_vec, dtype=np.complex128).ravel()
            right_vec = np.asarray(right_vec, dtype=np.complex128).ravel()
            for name, v in (("left", left_vec), ("right", right_vec)):
                if v.size != chi:
                    raise DimensionError(f"{name} boundary vector length {v.size} != chi {chi}")
                if abs(np.linalg.norm(v) - 1.0) > 1e-10:
                    raise ValueError(f"{name} boundary vector must have unit norm")
        else:
            if left_vec is not None or right_vec is not None:
                raise ValueError("ring states take no boundary vectors")

        self.tensors = [np.asarray(t, dtype=np.complex128) for t in tensors] \
            if not homogeneous else [np.asarray(tensors[0], dtype=np.complex128)] * len(tensors)
        self.boundary = boundary
        self.left_vec = left_vec
        self.right_vec = right_vec
        self.homogeneous = homogeneous

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def phys_dim(self) -> int:
        return self.tensors[0].shape[0]

    @property
    def bond_dim(self) -> int:
        return self.tensors[0].shape[1]

    # -- contraction sweeps -------------------------------------------------

    def _right_envs(self) -> list[np.ndarray]:
        """Right environments V_k for open chains, k = 0..N.

        V_k sums the chain from site k to the right boundary;
        V_N = |right><right| and V_k = sum_i A^i[k] V_{k+1} A^i[k]^dag.
        """
        v = np.outer(self.right_vec, self.right_vec.conj())
        envs = [v]
        for a in reversed(self.tensors):
            v = np.einsum("iab,bc,idc->ad", a, v, a.conj(), optimize=True)
            envs.append(v)
        envs.reverse()
        return envs

    def _left_env_start(self) -> np.ndarray:
        return np.outer(self.left_vec.conj(), self.left_vec)

    @staticmethod
    def _left_step(lam: np.ndarray, a: np.ndarray) -> np.ndarray:
        return np.einsum("ab,iac,ibd->cd", lam, a, a.conj(), optimize=True)

    def norm_squared(self) -> float:
        """<psi|psi> of the raw, unnormalized state."""
        if self.boundary == "obc":
            v = self._right_envs()[0]
            val = self.left_vec.conj() @ v @ self.left_vec
        else:
            val = self._ring_chain({})
        return float(val.real)

    def _ring_chain(self, site_ops: dict[int, np.ndarray]) -> complex:
        """Trace of the transfer chain with operators inserted at sites.

        The running product is carried as chi^2 stacked chi x chi
        blocks and each site map is applied blockwise, which keeps the
        cost at O(D chi^5) per site instead of chi^6.
        """
        chi = self.bond_dim
        m = np.eye(chi * chi, dtype=np.complex128).reshape(chi, chi, chi * chi)
        for k in range(self.n_sites - 1, -1, -1):
            a = self.tensors[k]
            op = site_ops.get(k)
            if op is None:
                m = np.einsum("iab,bcs,idc->ads", a, m, a.conj(), optimize=True)
            else:
                m = np.einsum("ij,jab,bcs,idc->ads", op, a, m, a.conj(), optimize=True)
        m4 = m.reshape(chi, chi, chi, chi)
        return complex(np.einsum("abab->", m4))

    def expectation(self, obs: LocalObservable) -> float:
        """Normalized expectation value of a product observable.

        The chain is contracted with the observable inserted on its
        block and divided by <psi|psi>; the roundoff-level imaginary
        part of the Hermitian expectation is discarded.
        """
        if obs.phys_dim != self.phys_dim:
            raise DimensionError(
                f"observable dimension {obs.phys_dim} != physical dimension {self.phys_dim}")
        if obs.start_site + obs.n_sites > self.n_sites:
            raise DimensionError(
                f"observable on sites [{obs.start_site}, {obs.start_site + obs.n_sites}) "
                f"does not fit in {self.n_sites} sites")
        site_ops = {obs.start_site + j: op for j, op in enumerate(obs.site_ops)}
        norm_sq = self.norm_squared()
        if norm_sq <= 0.0:
            raise ValueError("state has zero norm")
        if self.boundary == "pbc":
            return complex(self._ring_chain(site_ops)).real / norm_sq
        v = np.outer(self.right_vec, self.right_vec.conj())
        for k in range(self.n_sites - 1, -1, -1):
            a = self.tensors[k]
            op = site_ops.get(k)
            if op is None:
                v = np.einsum("iab,bc,idc->ad", a, v, a.conj(), optimize=True)
            else:
                # ket side carries the column index of the operator
                v = np.einsum("ij,jab,bc,idc->ad", op, a, v, a.conj(), optimize=True)
        val = self.left_vec.conj() @ v @ self.left_vec
        return float(val.real) / norm_sq

    def reduced_density_matrix(self, start: int, length: int,
                               cap: int = DENSITY_DIM_CAP) -> DensityMatrix:
        """Reduced state of ``length`` contiguous sites from ``start``.

        Entrywise block assembly between precomputed environments; the
        result is normalized to unit trace regardless of the state
        norm.  Block dimension D^length is capped.
        """
        n, d = self.n_sites, self.phys_dim
        if not (0 <= start and length >= 1 and start + length <= n):
            raise DimensionError(
                f"block [{start}, {start + length}) does not fit in {n} sites")
        block_dim = d**length
        check_density_cap(block_dim, cap)
        norm_sq = self.norm_squared()
        if norm_sq <= 0.0:
            raise ValueError("state has zero norm")

        if self.boundary == "obc":
            envs = self._right_envs()
            lam = self._left_env_start()
            for k in range(start):
                lam = self._left_step(lam, self.tensors[k])
            t = lam[np.newaxis, np.newaxis]  # axes (I, J, ket bond, bra bond)
            for k in range(start, start + length):
                a = self.tensors[k]
                t = np.einsum("IJab,iac,jbd->IiJjcd", t, a, a.conj(), optimize=True)
                dim = t.shape[0] * t.shape[1]
                t = t.reshape(dim, dim, a.shape[1], a.shape[1])
            rho = np.einsum("IJcd,cd->IJ", t, envs[start + length], optimize=True)
        else:
            chi = self.bond_dim
            # environment: transfer chain over all sites outside the block
            m = np.eye(chi * chi, dtype=np.complex128).reshape(chi, chi, chi * chi)
            outside = [k % n for k in range(start + length, start + n)]
            for k in reversed(outside):
                a = self.tensors[k]
                m = np.einsum("iab,bcs,idc->ads", a, m, a.conj(), optimize=True)
            g = m.reshape(chi, chi, chi, chi)  # g[b, bb, a, ab]
            t = np.einsum("ac,bd->abcd", np.eye(chi), np.eye(chi))[np.newaxis, np.newaxis]
            for k in range(start, start + length):
                a = self.tensors[k]
                t = np.einsum("IJabcd,ice,jdf->IiJjabef", t, a, a.conj(), optimize=True)
                dim = t.shape[0] * t.shape[1]
                t = t.reshape(dim, dim, chi, chi, chi, chi)
            rho = np.einsum("IJabef,efab->IJ", t, g, optimize=True)

        rho = rho / norm_sq
        rho = (rho + rho.conj().T) / 2.0
        return DensityMatrix((d,) * length, rho)

    def site_density_matrices(self) -> np.ndarray:
        """All one-site reduced density matrices, shape (N, D, D).

        One environment sweep for the whole chain, so the total cost is
        O(N D chi^3) on open chains.
        """
        n, d, chi = self.n_sites, self.phys_dim, self.bond_dim
        out = np.empty((n, d, d), dtype=np.complex128)
        if self.boundary == "obc":
            envs = self._right_envs()
            lam = self._left_env_start()
            norm_sq = float(np.einsum("ab,ab->", lam, envs[0]).real)
            if norm_sq <= 0.0:
                raise ValueError("state has zero norm")
            for k in range(n):
                a = self.tensors[k]
                out[k] = np.einsum("ab,iac,jbd,cd->ij", lam, a, a.conj(), envs[k + 1],
                                   optimize=True) / norm_sq
                lam = self._left_step(lam, a)
        else:
            eye = np.eye(chi * chi, dtype=np.complex128)
            prefix = [eye]  # prefix[k] = E_1 ... E_k as a chi^2 x chi^2 matrix
            for k in range(n):
                m = prefix[-1].reshape(chi * chi, chi, chi)
                m = np.einsum("sab,iac,ibd->scd", m, self.tensors[k],
                              self.tensors[k].conj(), optimize=True)
                prefix.append(m.reshape(chi * chi, chi * chi))
            suffix = [eye]  # suffix[j] = E_{k+2} ... E_N for k = n-1-j
            for k in range(n - 1, -1, -1):
                m = suffix[-1].reshape(chi, chi, chi * chi)
                m = np.einsum("iab,bcs,idc->ads", self.tensors[k], m,
                              self.tensors[k].conj(), optimize=True)
                suffix.append(m.reshape(chi * chi, chi * chi))
            suffix.reverse()
            norm_sq = float(np.trace(prefix[n]).real)
            if norm_sq <= 0.0:
                raise ValueError("state has zero norm")
            for k in range(n):
                g = (suffix[k + 1] @ prefix[k]).reshape(chi, chi, chi, chi)
                a = self.tensors[k]
                out[k] = np.einsum("iab,jcd,bdac->ij", a, a.conj(), g,
                                   optimize=True) / norm_sq
        return out

    def to_dense(self, cap: int = DENSE_AMPLITUDE_CAP) -> DenseState:
        """Dense amplitudes of the raw state (no normalization).

        Ring states carry an extra chi^2 memory factor while the chain
        is being assembled.
        """
        n, d = self.n_sites, self.phys_dim
        check_amplitude_cap(d**n, cap)
        if self.boundary == "obc":
            psi = self.left_vec.conj()[np.newaxis, :]
            for a in self.tensors:
                psi = np.einsum("Ia,iab->Iib", psi, a, optimize=True)
                psi = psi.reshape(-1, a.shape[2])
            amps = psi @ self.right_vec
        else:
            chi = self.bond_dim
            m = np.eye(chi, dtype=np.complex128)[np.newaxis]
            for a in self.tensors:
                m = np.einsum("Iab,ibc->Iiac", m, a, optimize=True)
                m = m.reshape(-1, chi, chi)
            amps = np.einsum("Iaa->I", m)
        return DenseState((d,) * n, amps)

    def max_isometry_defect(self) -> float:
        """Largest deviation of any site from sum_i A^i{}^dag A^i = 1."""
        chi = self.bond_dim
        eye = np.eye(chi)
        worst = 0.0
        for a in self.tensors:
            s = np.einsum("iab,iac->bc", a.conj(), a, optimize=True)
            worst = max(worst, float(np.abs(s - eye).max()))
        return worst


def a_matrices_from_unitary(u: np.ndarray, phys_dim: int, bond_dim: int) -> np.ndarray:
    """Site tensor set cut out of a unitary on site (x) bond space.

    The composite basis is physical-major: index (i, alpha) maps to
    i * bond_dim + alpha.  The returned array has shape (D, chi, chi)
    with A^i_{alpha, beta} = <i, alpha| U |0, beta>, and unitarity of U
    makes sum_i A^i{}^dag A^i the identity exactly.
    """
    u = np.asarray(u, dtype=np.complex128)
    d, chi = int(phys_dim), int(bond_dim)
    if d < 1 or chi < 1:
        raise DimensionError(f"dimensions must be positive, got D={d}, chi={chi}")
    if u.shape != (d * chi, d * chi):
        raise DimensionError(f"unitary shape {u.shape} != ({d * chi}, {d * chi})")
    require_unitary(u)
    return u.reshape(d, chi, d * chi)[:, :, :chi].copy()


def sample_rmps(n_sites: int, phys_dim: int, bond_dim: int, seed: Seed | int,
                homogeneous: bool = False, boundary: str = "obc") -> Mps:
    """Draw a random matrix product state from Haar-random unitaries.

    Site k gets its tensor set from a fresh unitary seeded with
    subseed(seed, k); homogeneous states reuse the site-0 unitary
    everywhere.  Open chains fix the left boundary to the first bond
    basis vector and draw the right boundary Haar-randomly from
    subseed(seed, n_sites).  The raw state is not normalized; all
    statistics downstream divide by norm_squared().
    """
    if n_sites < 1:
        raise DimensionError(f"n_sites must be positive, got {n_sites}")
    seed = as_seed(seed)
    if homogeneous:
        a = a_matrices_from_unitary(haar_unitary(phys_dim * bond_dim, subseed(seed, 0)),
                                    phys_dim, bond_dim)
        tensors = [a] * n_sites
    else:
        tensors = [
            a_matrices_from_unitary(haar_unitary(phys_dim * bond_dim, subseed(seed, k)),
                                    phys_dim, bond_dim)
            for k in range(n_sites)
        ]
    if boundary == "obc":
        left = np.zeros(bond_dim, dtype=np.complex128)
        left[0] = 1.0
        right = haar_state(bond_dim, subseed(seed, n_sites))
        return Mps(tensors, "obc", left, right, homogeneous=homogeneous)
    return Mps(tensors, "pbc", homogeneous=homogeneous)


def overlap(a: Mps, b: Mps) -> complex:
    """Raw overlap <a|b> of two states with matching site structure.

    Bond dimensions may differ.  The mixed sweep keeps a chi_b x chi_a
    matrix, updated as V <- sum_i B^i V A^i{}^dag.
    """
    if a.n_sites != b.n_sites or a.phys_dim != b.phys_dim:
        raise DimensionError("states must share site count and physical dimension")
    if a.boundary != b.boundary:
        raise DimensionError("states must share the boundary type")
    if a.boundary == "obc":
        v = np.outer(b.right_vec, a.right_vec.conj())
        for k in range(a.n_sites - 1, -1, -1):
            v = np.einsum("iab,bc,idc->ad", b.tensors[k], v, a.tensors[k].conj(),
                          optimize=True)
        return complex(b.left_vec.conj() @ v @ a.left_vec)
    chi_a, chi_b = a.bond_dim, b.bond_dim
    m = np.eye(chi_b * chi_a, dtype=np.complex128).reshape(chi_b, chi_a, chi_b * chi_a)
    for k in range(a.n_sites - 1, -1, -1):
        m = np.einsum("iab,bcs,idc->ads", b.tensors[k], m, a.tensors[k].conj(),
                      optimize=True)
    m4 = m.reshape(chi_b, chi_a, chi_b, chi_a)
    return complex(np.einsum("abab->", m4))


def transfer_identity(mps: Mps, site: int) -> np.ndarray:
    """Transfer matrix sum_i A^i (x) A^i{}^* of one site, chi^2 x chi^2."""
    a = mps.tensors[site]
    chi = mps.bond_dim
    return np.einsum("iab,icd->acbd", a, a.conj()).reshape(chi * chi, chi * chi)


def transfer_observable(mps: Mps, site: int, op: np.ndarray) -> np.ndarray:
    """Transfer matrix sum_ij <i|op|j> A^i (x) A^j{}^* of one site.

    Rows of op index the ket copy (left factor), columns the conjugated
    copy.  With op = identity this reduces to transfer_identity.  Note
    that folding a chain of these against the boundary weights contracts
    op[i, j] with c_i conj(c_j), the expectation of the transposed
    operator; pass op.T to recover Mps.expectation(op).
    """
    a = mps.tensors[site]
    op = np.asarray(op, dtype=np.complex128)
    d, chi = mps.phys_dim, mps.bond_dim
    if op.shape != (d, d):
        raise DimensionError(f"operator shape {op.shape} != ({d}, {d})")
    return np.einsum("ij,iab,jcd->acbd", op, a, a.conj(),
                     optimize=True).reshape(chi * chi, chi * chi)


# -- serialization ----------------------------------------------------------
#
# Container layout (NumPy .npz archive, no pickling):
#   header   0-d string array with a JSON object:
#            {"n_sites", "phys_dim", "bond_dim", "boundary", "homogeneous"}
#   tensors  complex array, shape (1, D, chi, chi) for homogeneous states
#            and (n_sites, D, chi, chi) otherwise, row-major
#   left_vec / right_vec   complex (chi,) arrays, open chains only


def save_mps(mps: Mps, path) -> None:
    """Write an MPS to ``path`` in the documented .npz container."""
    header = json.dumps({
        "n_sites": mps.n_sites,
        "phys_dim": mps.phys_dim,
        "bond_dim": mps.bond_dim,
        "boundary": mps.boundary,
        "homogeneous": mps.homogeneous,
    }, sort_keys=True)
    arrays = {"header": np.array(header)}
    if mps.homogeneous:
        arrays["tensors"] = mps.tensors[0][np.newaxis]
    else:
        arrays["tensors"] = np.stack(mps.tensors)
    if mps.boundary == "obc":
        arrays["left_vec"] = mps.left_vec
        arrays["right_vec"] = mps.right_vec
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_mps(path) -> Mps:
    """Read an MPS written by save_mps; homogeneous aliasing is restored."""
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"][()]))
        stored = np.ascontiguousarray(data["tensors"])
        left = data["left_vec"] if "left_vec" in data.files else None
        right = data["right_vec"] if "right_vec" in data.files else None
    n = int(header["n_sites"])
    if header["homogeneous"]:
        tensors = [stored[0]] * n
    else:
        if stored.shape[0] != n:
            raise DimensionError(
                f"container holds {stored.shape[0]} tensor sets for {n} sites")
        tensors = [stored[k] for k in range(n)]
    return Mps(tensors, header["boundary"], left, right,
               homogeneous=bool(header["homogeneous"]))
