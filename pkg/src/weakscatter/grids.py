"""Discretized translational states.

Rectangular momentum grids with power-of-two sizes, spinor- or scalar-
valued wave fields, Gaussian packets (complex centers allowed), unitary
FFT duals, displacement operators, moments and plane heatmaps.

Conventions: axis k of size n spans momenta [-p_max, p_max) with spacing
dp = 2 p_max / n; the position dual spans a box of length 2 pi hbar / dp
with spacing dr = 2 pi hbar / (n dp).  The momentum amplitude is the
transform with kernel exp(-i p . r / hbar), so position -> momentum uses
a forward FFT and the round trip is the identity to machine precision.
Quadrature norms (sum |amplitude|^2 times the volume element) are
preserved exactly by the basis change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import (
    AxisError,
    ContainmentError,
    NonGaussianComplexShift,
    RepresentationError,
    ResolutionError,
)
from .spin import SpinorState

__all__ = [
    "AXIS_INDEX",
    "GridAxis",
    "GridSpec",
    "GaussianSpec",
    "WaveField",
    "Moments",
    "make_gaussian",
    "to_position",
    "to_momentum",
    "displace",
    "moments",
    "slice_heatmap",
    "inner",
    "position_weight",
    "edge_mass",
]

AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

MOMENTUM = "momentum"
POSITION = "position"


@dataclass(frozen=True)
class GridAxis:
    name: str
    n: int
    p_max: float

    def __post_init__(self):
        if self.name not in AXIS_INDEX:
            raise AxisError(f"unknown axis {self.name!r}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError("axis size must be a power of two >= 8")
        if self.p_max <= 0:
            raise ValueError("p_max must be positive")

    @property
    def dp(self) -> float:
        return 2.0 * self.p_max / self.n


@dataclass(frozen=True)
class GridSpec:
    """Momentum-space grid over an ordered subset of the axes x, y, z."""

    axes: tuple[GridAxis, ...]
    hbar: float = 1.0

    def __post_init__(self):
        names = [a.name for a in self.axes]
        if not names:
            raise AxisError("grid needs at least one axis")
        if len(set(names)) != len(names):
            raise AxisError("duplicate axis names")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @classmethod
    def make(cls, hbar: float = 1.0, **axes) -> "GridSpec":
        """GridSpec.make(x=(256, 8.0), z=(256, 8.0)) style constructor."""
        return cls(
            axes=tuple(GridAxis(name, n, p_max) for name, (n, p_max) in axes.items()),
            hbar=hbar,
        )

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.n for a in self.axes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def dp(self) -> tuple[float, ...]:
        return tuple(a.dp for a in self.axes)

    @property
    def dr(self) -> tuple[float, ...]:
        return tuple(2.0 * np.pi * self.hbar / (a.n * a.dp) for a in self.axes)

    @property
    def dvol_p(self) -> float:
        return math.prod(self.dp)

    @property
    def dvol_r(self) -> float:
        return math.prod(self.dr)

    def axis_pos(self, name: str) -> int:
        for i, a in enumerate(self.axes):
            if a.name == name:
                return i
        raise AxisError(f"axis {name!r} not on this grid")

    def momentum_coords(self, i: int) -> np.ndarray:
        a = self.axes[i]
        return (np.arange(a.n) - a.n // 2) * a.dp

    def position_coords(self, i: int) -> np.ndarray:
        a = self.axes[i]
        return (np.arange(a.n) - a.n // 2) * self.dr[i]

    def coords(self, i: int, rep: str) -> np.ndarray:
        return self.momentum_coords(i) if rep == MOMENTUM else self.position_coords(i)

    def broadcast(self, values: np.ndarray, i: int, spinor: bool) -> np.ndarray:
        """Reshape a 1D per-axis array so it broadcasts along grid axis i."""
        shape = [1] * (self.ndim + (1 if spinor else 0))
        shape[i] = len(values)
        return values.reshape(shape)


@dataclass(frozen=True)
class GaussianSpec:
    """Separable Gaussian packet in momentum space.

    ``center`` and ``sigma`` are 3-vectors indexed (x, y, z); entries for
    axes missing from the grid are ignored.  An imaginary center part
    displaces the packet in position space.  ``spin`` of None gives a
    scalar (spinless) field.
    """

    center: tuple[complex, complex, complex] = (0.0, 0.0, 0.0)
    sigma: tuple[float, float, float] = (1.0, 1.0, 1.0)
    spin: Optional[SpinorState] = None

    def __post_init__(self):
        if len(self.center) != 3 or len(self.sigma) != 3:
            raise ValueError("center and sigma must be 3-vectors")
        if any(s <= 0 for s in self.sigma):
            raise ValueError("sigma must be positive")
        object.__setattr__(self, "center", tuple(complex(c) for c in self.center))
        object.__setattr__(self, "sigma", tuple(float(s) for s in self.sigma))

    def axis_center(self, name: str) -> complex:
        return self.center[AXIS_INDEX[name]]

    def axis_sigma(self, name: str) -> float:
        return self.sigma[AXIS_INDEX[name]]

    def displaced(self, dp: np.ndarray) -> "GaussianSpec":
        c = np.asarray(self.center, dtype=complex) + np.asarray(dp, dtype=complex)
        return replace(self, center=tuple(c))


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex amplitudes on a grid, in momentum or position representation.

    The trailing axis of ``data`` is the spin index when ``spinor`` is
    true.  ``gaussian`` carries the analytic momentum-space form when the
    field is a pure Gaussian; operations that break that form drop it.
    Instances are immutable; operations return new fields.
    """

    grid: GridSpec
    data: np.ndarray
    rep: str
    gaussian: Optional[GaussianSpec] = None

    def __post_init__(self):
        if self.rep not in (MOMENTUM, POSITION):
            raise RepresentationError(f"unknown representation {self.rep!r}")
        data = np.asarray(self.data, dtype=complex)
        if data.shape == self.grid.shape + (2,):
            pass
        elif data.shape == self.grid.shape:
            pass
        else:
            raise ValueError(
                f"data shape {data.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(data.view(float))):
            raise ValueError("amplitudes must be finite")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def spinor(self) -> bool:
        return self.data.ndim == self.grid.ndim + 1

    @property
    def dvol(self) -> float:
        return self.grid.dvol_p if self.rep == MOMENTUM else self.grid.dvol_r

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2) * self.dvol)

    def density(self) -> np.ndarray:
        """|amplitude|^2 with the spin traced out."""
        d = np.abs(self.data) ** 2
        return d.sum(axis=-1) if self.spinor else d


def _require_rep(f: WaveField, rep: str):
    if f.rep != rep:
        raise RepresentationError(f"field is in {f.rep} representation, need {rep}")


def make_gaussian(grid: GridSpec, spec: GaussianSpec) -> WaveField:
    """Sample a normalized Gaussian packet on the grid.

    Guards: at least 4 grid points per sigma on every axis, and the real
    center must sit at least 5 sigma away from the grid edge.
    """
    data = _evaluate_gaussian(grid, spec)
    if spec.spin is not None:
        data = data[..., None] * spec.spin.vec
    n2 = np.sum(np.abs(data) ** 2) * grid.dvol_p
    data = data / np.sqrt(n2)
    return WaveField(grid=grid, data=data, rep=MOMENTUM, gaussian=spec)


def _evaluate_gaussian(grid: GridSpec, spec: GaussianSpec) -> np.ndarray:
    data = np.ones(grid.shape, dtype=complex)
    for i, axis in enumerate(grid.axes):
        c = spec.axis_center(axis.name)
        sigma = spec.axis_sigma(axis.name)
        if sigma / axis.dp < 4.0:
            raise ResolutionError(
                f"axis {axis.name}: sigma={sigma} spans fewer than 4 grid points"
            )
        if abs(c.real) + 5.0 * sigma > axis.p_max:
            raise ContainmentError(
                f"axis {axis.name}: |center| + 5 sigma = "
                f"{abs(c.real) + 5 * sigma:.3g} exceeds p_max={axis.p_max}"
            )
        p = grid.momentum_coords(i)
        f = np.exp(-((p - c) ** 2) / (4.0 * sigma**2))
        data = data * grid.broadcast(f, i, spinor=False)
    return data


def _grid_axes(f: WaveField) -> tuple[int, ...]:
    return tuple(range(f.grid.ndim))


def to_position(f: WaveField) -> WaveField:
    """Unitary change of basis momentum -> position."""
    _require_rep(f, MOMENTUM)
    axes = _grid_axes(f)
    data = np.fft.ifftshift(f.data, axes=axes)
    data = np.fft.ifftn(data, axes=axes)
    data = np.fft.fftshift(data, axes=axes)
    scale = math.prod(a.n * a.dp for a in f.grid.axes)
    scale /= (2.0 * np.pi * f.grid.hbar) ** (f.grid.ndim / 2.0)
    return WaveField(grid=f.grid, data=data * scale, rep=POSITION, gaussian=f.gaussian)


def to_momentum(f: WaveField) -> WaveField:
    """Unitary change of basis position -> momentum."""
    _require_rep(f, POSITION)
    axes = _grid_axes(f)
    data = np.fft.ifftshift(f.data, axes=axes)
    data = np.fft.fftn(data, axes=axes)
    data = np.fft.fftshift(data, axes=axes)
    scale = math.prod(f.grid.dr)
    scale /= (2.0 * np.pi * f.grid.hbar) ** (f.grid.ndim / 2.0)
    return WaveField(grid=f.grid, data=data * scale, rep=MOMENTUM, gaussian=f.gaussian)


def _check_inactive(grid: GridSpec, vec3: np.ndarray, what: str):
    active = set(grid.names)
    for name, k in AXIS_INDEX.items():
        if name not in active and abs(vec3[k]) > 0.0:
            raise AxisError(f"{what} has a component on inactive axis {name!r}")


def displace(f: WaveField, dp) -> WaveField:
    """Shift the momentum amplitude: returns the field phi(p - dp).

    Real shifts are applied as exact position-space phases.  A complex
    shift is an analytic continuation and is only defined for fields with
    Gaussian backing; the result is renormalized since the complex shift
    is not unitary.
    """
    _require_rep(f, MOMENTUM)
    dp = np.asarray(dp, dtype=complex)
    if dp.shape != (3,):
        raise ValueError("dp must be a 3-vector")
    _check_inactive(f.grid, dp, "displacement")

    if np.any(dp.imag != 0.0):
        if f.gaussian is None:
            raise NonGaussianComplexShift(
                "complex displacement needs a Gaussian-backed field"
            )
        return make_gaussian(f.grid, f.gaussian.displaced(dp))

    if f.gaussian is not None:
        # Keep the analytic backing honest: the shifted packet must stay
        # inside the containment guard.
        shifted = f.gaussian.displaced(dp)
        for axis in f.grid.axes:
            c = shifted.axis_center(axis.name)
            if abs(c.real) + 5.0 * shifted.axis_sigma(axis.name) > axis.p_max:
                raise ContainmentError(
                    f"axis {axis.name}: displaced center leaves the grid"
                )
        backing = shifted
    else:
        backing = None

    fr = to_position(f)
    phase = np.ones(f.grid.shape, dtype=complex)
    for i, axis in enumerate(f.grid.axes):
        a = dp[AXIS_INDEX[axis.name]].real
        if a != 0.0:
            r = f.grid.position_coords(i)
            phase = phase * f.grid.broadcast(
                np.exp(1j * a * r / f.grid.hbar), i, spinor=False
            )
    data = fr.data * (phase[..., None] if f.spinor else phase)
    shifted_r = WaveField(grid=f.grid, data=data, rep=POSITION, gaussian=backing)
    return to_momentum(shifted_r)


@dataclass(frozen=True)
class Moments:
    """Norm and low-order moments; arrays follow the grid axis order."""

    norm2: float
    mean_p: np.ndarray
    cov_p: np.ndarray
    mean_r: np.ndarray


def moments(f: WaveField) -> Moments:
    """Quadrature norm, momentum mean and covariance, and position mean."""
    fp = f if f.rep == MOMENTUM else to_momentum(f)
    rho = fp.density()
    norm2 = float(rho.sum() * f.grid.dvol_p)
    d = f.grid.ndim
    mean_p = np.empty(d)
    second = np.empty((d, d))
    coords = [f.grid.momentum_coords(i) for i in range(d)]
    for i in range(d):
        ci = f.grid.broadcast(coords[i], i, spinor=False)
        mean_p[i] = (rho * ci).sum() * f.grid.dvol_p / norm2
        for j in range(i, d):
            cj = f.grid.broadcast(coords[j], j, spinor=False)
            second[i, j] = second[j, i] = (rho * ci * cj).sum() * f.grid.dvol_p / norm2
    cov_p = second - np.outer(mean_p, mean_p)

    fr = to_position(fp)
    rho_r = fr.density()
    nr = rho_r.sum() * f.grid.dvol_r
    mean_r = np.empty(d)
    for i in range(d):
        ri = f.grid.broadcast(f.grid.position_coords(i), i, spinor=False)
        mean_r[i] = (rho_r * ri).sum() * f.grid.dvol_r / nr
    return Moments(norm2=norm2, mean_p=mean_p, cov_p=cov_p, mean_r=mean_r)


def slice_heatmap(
    f: WaveField,
    plane: tuple[str, str],
    reduce: str = "marginalize",
    index: Optional[dict] = None,
) -> np.ndarray:
    """Probability density on an axis-pair plane.

    ``marginalize`` integrates the remaining axes (the result times the
    two spacings sums to the squared norm); ``fix-index`` takes a single
    slice, by default through the center of each remaining axis.
    """
    if f.grid.ndim < 2:
        raise AxisError("heatmap needs at least two active axes")
    a, b = plane
    if a == b:
        raise AxisError("plane axes must differ")
    ia, ib = f.grid.axis_pos(a), f.grid.axis_pos(b)
    rho = f.density()
    others = [i for i in range(f.grid.ndim) if i not in (ia, ib)]
    if reduce == "marginalize":
        for i in sorted(others, reverse=True):
            step = f.grid.dp[i] if f.rep == MOMENTUM else f.grid.dr[i]
            rho = rho.sum(axis=i) * step
    elif reduce == "fix-index":
        index = index or {}
        for i in sorted(others, reverse=True):
            name = f.grid.axes[i].name
            rho = np.take(rho, index.get(name, f.grid.axes[i].n // 2), axis=i)
    else:
        raise AxisError(f"unknown reduction {reduce!r}")
    # Axes collapse in grid order; put the requested pair in (a, b) order.
    if ia > ib:
        rho = rho.T
    return rho


def inner(f: WaveField, g: WaveField) -> complex:
    """Quadrature inner product <f|g>; fields must share grid, rep and kind."""
    if f.grid != g.grid or f.rep != g.rep or f.spinor != g.spinor:
        raise ValueError("fields are not directly comparable")
    return complex(np.sum(f.data.conjugate() * g.data) * f.dvol)


def position_weight(f: WaveField, axis: str) -> WaveField:
    """Apply the position operator along one axis, returning the input rep.

    In the momentum representation this is the spectral evaluation of
    i hbar d/dp along that axis.
    """
    i = f.grid.axis_pos(axis)
    fr = f if f.rep == POSITION else to_position(f)
    r = f.grid.broadcast(f.grid.position_coords(i), i, spinor=f.spinor)
    weighted = WaveField(grid=f.grid, data=fr.data * r, rep=POSITION)
    return weighted if f.rep == POSITION else to_momentum(weighted)


def edge_mass(f: WaveField, cells: int = 2) -> float:
    """Fraction of the squared norm within ``cells`` points of any boundary."""
    rho = f.density()
    total = rho.sum()
    if total == 0.0:
        return 0.0
    interior = rho[tuple(slice(cells, -cells) for _ in range(f.grid.ndim))]
    return float(1.0 - interior.sum() / total)
