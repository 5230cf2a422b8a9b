"""Two-level (spin-1/2) state algebra.

Pauli operators along arbitrary axes, their eigenspinors, and the weak
tensors built from a pre-selected state ``chi_i`` and a post-selected
state ``chi_f``:

    entry(k1, ..., kn) = <chi_f| sigma_k1 ... sigma_kn |chi_i> / <chi_f|chi_i>

The rank-1 tensor is the weak vector.  Weak values are unbounded as the
selections approach orthogonality, so every weak-tensor routine rejects
selections with |<chi_f|chi_i>| below a configurable tolerance instead of
silently overflowing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import OrthogonalSelection

__all__ = [
    "SpinorState",
    "UnitDirection",
    "WeakTensor",
    "PAULI",
    "pauli_along",
    "eigenspinor",
    "weak_tensor",
    "weak_vector",
    "ORTHOGONALITY_TOL",
]

#: Default threshold on |<chi_f|chi_i>| below which selections count as orthogonal.
ORTHOGONALITY_TOL = 1e-10

PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)
PAULI.flags.writeable = False


def _fix_phase(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate a global phase so the first non-negligible component is real positive."""
    for c in v:
        if abs(c) > tol:
            return v * (c.conjugate() / abs(c))
    return v


@dataclass(frozen=True)
class UnitDirection:
    """Real unit vector; components are normalized at construction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n = np.sqrt(self.x**2 + self.y**2 + self.z**2)
        if n == 0.0:
            raise ValueError("direction must be nonzero")
        object.__setattr__(self, "x", self.x / n)
        object.__setattr__(self, "y", self.y / n)
        object.__setattr__(self, "z", self.z / n)

    @classmethod
    def from_polar(cls, theta: float, phi: float = 0.0) -> "UnitDirection":
        """Direction cos(theta) z + sin(theta)(cos(phi) x + sin(phi) y)."""
        st = np.sin(theta)
        return cls(st * np.cos(phi), st * np.sin(phi), np.cos(theta))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class SpinorState:
    """Normalized 2-component spin state in the z eigenbasis."""

    a0: complex
    a1: complex

    def __post_init__(self):
        n = np.sqrt(abs(self.a0) ** 2 + abs(self.a1) ** 2)
        if n == 0.0:
            raise ValueError("spinor must be nonzero")
        object.__setattr__(self, "a0", complex(self.a0) / n)
        object.__setattr__(self, "a1", complex(self.a1) / n)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.a0, self.a1])

    def overlap(self, other: "SpinorState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.vec, other.vec))


@dataclass(frozen=True)
class WeakTensor:
    """Rank-n Cartesian tensor of weak values; ``entries`` has shape (3,)*n."""

    rank: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (3,) * self.rank:
            raise ValueError(f"rank-{self.rank} tensor needs shape {(3,) * self.rank}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def vector(self) -> np.ndarray:
        if self.rank != 1:
            raise ValueError("only rank-1 tensors expose .vector")
        return self.entries

    def contract(self, *directions: UnitDirection) -> complex:
        """Contract every index with the given unit vectors."""
        if len(directions) != self.rank:
            raise ValueError(f"need {self.rank} directions, got {len(directions)}")
        out = self.entries
        for d in directions:
            out = np.tensordot(out, d.vec, axes=([0], [0]))
        return complex(out)


def pauli_along(m: UnitDirection) -> np.ndarray:
    """Pauli operator sigma . m for a unit direction m (Hermitian, traceless)."""
    return m.x * PAULI[0] + m.y * PAULI[1] + m.z * PAULI[2]


def eigenspinor(m: UnitDirection, s: int) -> SpinorState:
    """Eigenstate of sigma . m with eigenvalue (-1)**s.

    The global phase is fixed so the first non-negligible component in the
    z basis is real and positive.
    """
    if s not in (0, 1):
        raise ValueError("s must be 0 or 1")
    # Two algebraically equivalent forms; pick the numerically stable one
    # (the other degenerates when m is close to -z / +z respectively).
    if s == 0:
        v = (
            np.array([1.0 + m.z, m.x + 1j * m.y])
            if m.z >= 0.0
            else np.array([m.x - 1j * m.y, 1.0 - m.z])
        )
    else:
        v = (
            np.array([-m.x + 1j * m.y, 1.0 + m.z])
            if m.z >= 0.0
            else np.array([1.0 - m.z, -(m.x + 1j * m.y)])
        )
    v = _fix_phase(v / np.linalg.norm(v))
    return SpinorState(v[0], v[1])


def weak_tensor(
    n: int,
    chi_i: SpinorState,
    chi_f: SpinorState,
    orth_tol: float = ORTHOGONALITY_TOL,
) -> WeakTensor:
    """Rank-n weak tensor of the Pauli vector for the given selections.

    Entry (k1, ..., kn) is the normalized matrix element of the ordered
    operator product sigma_k1 sigma_k2 ... sigma_kn.

    Raises OrthogonalSelection when |<chi_f|chi_i>| <= orth_tol.
    """
    if n < 0:
        raise ValueError("rank must be non-negative")
    denom = chi_f.overlap(chi_i)
    if abs(denom) <= orth_tol:
        raise OrthogonalSelection(
            f"|<chi_f|chi_i>| = {abs(denom):.3e} <= {orth_tol:.3e}"
        )
    entries = np.empty((3,) * n, dtype=complex)
    bra = chi_f.vec.conjugate()
    for idx in itertools.product(range(3), repeat=n):
        ket = chi_i.vec
        for k in reversed(idx):  # rightmost factor acts first
            ket = PAULI[k] @ ket
        entries[idx] = (bra @ ket) / denom
    return WeakTensor(rank=n, entries=entries)


def weak_vector(
    chi_i: SpinorState,
    chi_f: SpinorState,
    orth_tol: float = ORTHOGONALITY_TOL,
) -> np.ndarray:
    """Weak vector <chi_f|sigma|chi_i> / <chi_f|chi_i> as a complex 3-vector."""
    return weak_tensor(1, chi_i, chi_f, orth_tol=orth_tol).vector
