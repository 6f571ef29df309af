"""Seedable Haar-random sources.

All randomness in this package flows through this module so that every
ensemble is reproducible from a single 64-bit master seed.  Generators
are counter-based (Philox), and per-sample seeds are derived with a
splitmix64 chain, so a batch of samples gives identical results no
matter how it is split across workers or evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # splitmix64 increment


def _mix64(x: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit integers."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class Seed:
    """A 64-bit unsigned seed value."""

    value: int

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise TypeError(f"seed value must be an integer, got {type(self.value).__name__}")
        if not 0 <= self.value <= _MASK64:
            raise ValueError(f"seed value must fit in 64 unsigned bits, got {self.value}")


def as_seed(seed: Seed | int) -> Seed:
    """Coerce an integer to a Seed; Seed instances pass through."""
    return seed if isinstance(seed, Seed) else Seed(seed)


def subseed(seed: Seed | int, index: int) -> Seed:
    """Derive the index-th child of a seed.

    Chains one splitmix64 step with its finalizer.  The finalizer is a
    bijection and the step increment is odd, so for a fixed parent the
    map index -> child seed is injective: distinct sample indices can
    never collide.
    """
    if index < 0:
        raise ValueError(f"subseed index must be nonnegative, got {index}")
    parent = as_seed(seed)
    return Seed(_mix64((parent.value + (index + 1) * _GAMMA) & _MASK64))


def generator(seed: Seed | int) -> np.random.Generator:
    """Counter-based random generator keyed by the seed."""
    return np.random.Generator(np.random.Philox(key=as_seed(seed).value))


def ginibre(n: int, seed: Seed | int) -> np.ndarray:
    """n x n matrix of i.i.d. standard complex Gaussian entries.

    Each entry is x + iy with x and y independent N(0, 1) variables.
    The full real part is drawn before the imaginary part, which pins
    the exact output for a given seed.
    """
    if n < 1:
        raise DimensionError(f"matrix dimension must be positive, got {n}")
    rng = generator(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def haar_unitary(n: int, seed: Seed | int) -> np.ndarray:
    """Haar-distributed n x n unitary matrix.

    QR-decomposes a Ginibre matrix and multiplies each column of Q by
    the phase of the matching diagonal entry of R.  The phase fix makes
    the decomposition unique (R diagonal real positive); without it the
    output is visibly not Haar, e.g. its eigenvalue angles bunch up
    instead of being uniform.
    """
    z = ginibre(n, seed)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    u = q * (diag / np.abs(diag))[np.newaxis, :]
    require_unitary(u)
    return u


def haar_state(n: int, seed: Seed | int) -> np.ndarray:
    """Haar-random unit vector in C^n.

    A normalized vector of i.i.d. complex Gaussians; by unitary
    invariance this has the same distribution as the first column of a
    Haar unitary, at a fraction of the cost.
    """
    if n < 1:
        raise DimensionError(f"state dimension must be positive, got {n}")
    rng = generator(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def require_unitary(u: np.ndarray, tol: float = 1e-12) -> None:
    """Raise unless ``u`` is unitary to within ``tol``.

    The check is the max-entry norm of U^dag U - I.
    """
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {u.shape}")
    defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if defect > tol:
        raise ValueError(f"matrix is not unitary: defect {defect:.3e} exceeds {tol:.1e}")
