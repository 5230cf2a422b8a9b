"""Stern-Gerlach apparatus description.

Coupling tensors derived from magnetic-field gradients under the
source-free Maxwell constraints, and compact-support window functions
with their Fourier transforms.

A field linear in position and confined to the xz plane,

    B(r) = x_hat (Bxx x + Bxz z) + z_hat (Bzx x + Bzz z),

is divergence- and curl-free iff Bxx + Bzz = 0 and Bzx - Bxz = 0.  The
dipole interaction then takes the form -hbar eta R . H . sigma with a
symmetric traceless tensor

    H = Hxx (xx - zz) + Hxz (xz + zx),

whose entries follow from the gradients as Hxx = Bxx / s, Hxz = Bxz / s
with s = max(|Bxx|, |Bxz|); the magnitude s and the physical constants
are absorbed into eta = (gS muB / 2 hbar) s >= 0.  (The overall dipole
sign is folded into this split as well, so eta stays positive.)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidField, ZeroField
from .spin import UnitDirection

__all__ = [
    "CouplingTensor",
    "FieldGradients",
    "Window",
    "MaxwellReport",
    "validate_maxwell",
    "coupling_from_gradients",
    "window_fourier",
    "backscatter_ratio",
    "GS_ELECTRON",
]

#: Electron spin g-factor.
GS_ELECTRON = 2.00231930419922


@dataclass(frozen=True)
class CouplingTensor:
    """Dimensionless 3x3 tensor linking position and spin operators.

    ``constrained`` records whether the tensor came out of Maxwell
    validation; arbitrary tensors (such as the textbook zz or z m_hat
    couplings) may be constructed directly but are flagged unconstrained.
    """

    matrix: np.ndarray
    constrained: bool = False

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("coupling tensor must be 3x3")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def maxwell(cls, hxx: float, hxz: float) -> "CouplingTensor":
        """Member of the two-parameter Maxwell family Hxx(xx - zz) + Hxz(xz + zx)."""
        m = np.zeros((3, 3))
        m[0, 0] = hxx
        m[2, 2] = -hxx
        m[0, 2] = m[2, 0] = hxz
        return cls(matrix=m, constrained=True)

    @classmethod
    def outer(cls, a: UnitDirection, b: UnitDirection) -> "CouplingTensor":
        """Unconstrained dyadic a b (for example the textbook z m_hat coupling)."""
        return cls(matrix=np.outer(a.vec, b.vec), constrained=False)

    @property
    def hxx(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def hxz(self) -> float:
        return float(self.matrix[0, 2])

    @property
    def max_entry(self) -> float:
        return float(np.max(np.abs(self.matrix)))


@dataclass(frozen=True)
class FieldGradients:
    """Constant gradients of the transverse magnetic field, in field per length."""

    bxx: float
    bxz: float
    bzx: float
    bzz: float

    @property
    def scale(self) -> float:
        return max(abs(self.bxx), abs(self.bxz), abs(self.bzx), abs(self.bzz))


class MaxwellReport(NamedTuple):
    ok: bool
    residual_div: float
    residual_curl: float


def validate_maxwell(b: FieldGradients, tol: float = 1e-12) -> MaxwellReport:
    """Check the no-monopole and no-current conditions on the gradients.

    Residuals are |Bxx + Bzz| and |Bzx - Bxz|; both must stay below
    tol times the overall gradient scale.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    residual_div = abs(b.bxx + b.bzz)
    residual_curl = abs(b.bzx - b.bxz)
    bound = tol * b.scale
    return MaxwellReport(
        ok=(residual_div <= bound and residual_curl <= bound),
        residual_div=residual_div,
        residual_curl=residual_curl,
    )


def coupling_from_gradients(
    b: FieldGradients,
    gs: float = GS_ELECTRON,
    mu_b: float = 1.0,
    hbar: float = 1.0,
    tol: float = 1e-12,
) -> tuple[float, CouplingTensor]:
    """Split a Maxwell-valid gradient set into (eta, H).

    Normalization: max(|Hxx|, |Hxz|) = 1 and eta = (gs mu_b / 2 hbar) *
    max(|Bzz|, |Bxz|) >= 0.

    Raises ZeroField for an identically zero gradient set and InvalidField
    when the Maxwell residuals exceed tolerance.
    """
    if b.scale == 0.0:
        raise ZeroField("all gradients are zero")
    report = validate_maxwell(b, tol=tol)
    if not report.ok:
        raise InvalidField(
            f"Maxwell residuals div={report.residual_div:.3e} "
            f"curl={report.residual_curl:.3e} exceed tolerance"
        )
    s = max(abs(b.bzz), abs(b.bxz))
    eta = 0.5 * gs * mu_b * s / hbar
    return eta, CouplingTensor.maxwell(hxx=b.bxx / s, hxz=b.bxz / s)


@dataclass(frozen=True)
class Window:
    """Boxcar window: 1 on [center - extent/2, center + extent/2], 0 outside.

    ``extent`` is the duration T for temporal windows or the length L for
    spatial ones; the integral of the window equals the extent either way.
    """

    extent: float
    center: float = 0.0
    kind: str = field(default="boxcar")

    def __post_init__(self):
        if self.kind != "boxcar":
            raise ValueError(f"unsupported window kind {self.kind!r}")
        if self.extent <= 0:
            raise ValueError("extent must be positive")

    @property
    def support(self) -> tuple[float, float]:
        h = 0.5 * self.extent
        return (self.center - h, self.center + h)

    @property
    def integral(self) -> float:
        return self.extent

    def __call__(self, u):
        """Evaluate the window at scalar or array argument."""
        lo, hi = self.support
        return np.where((np.asarray(u) >= lo) & (np.asarray(u) <= hi), 1.0, 0.0)


def window_fourier(w: Window, p, hbar: float = 1.0):
    """Fourier transform (1/2 pi hbar) integral of exp(-i p y / hbar) g(y).

    For the centered boxcar this is sin(p L / 2 hbar) / (pi p), continuous
    at p = 0 with value L / (2 pi hbar).  An off-center window contributes
    an extra phase exp(-i p center / hbar).  Accepts scalars or arrays.
    """
    p = np.asarray(p, dtype=float)
    base = (w.extent / (2.0 * np.pi * hbar)) * np.sinc(p * w.extent / (2.0 * np.pi * hbar))
    if w.center != 0.0:
        out = base * np.exp(-1j * p * w.center / hbar)
    else:
        out = base
    return out if out.ndim else out[()]


def backscatter_ratio(w: Window, p0: float, hbar: float = 1.0) -> float:
    """|g_bar(2 p0) / g_bar(0)| = |sin(p0 L / hbar)| / (p0 L / hbar), p0 > 0."""
    if p0 <= 0:
        raise ValueError("p0 must be positive")
    u = p0 * w.extent / hbar
    return abs(np.sin(u)) / u
